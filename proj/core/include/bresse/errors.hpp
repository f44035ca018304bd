#pragma once

#include <stdexcept>
#include <string>

namespace bresse {

// Rejected input: bad parameters, inadmissible geometry, malformed config.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation produced a result that cannot be trusted (non-finite state,
// singular factorization, broken energy monotonicity).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// (i*lambda - A) is numerically singular: lambda sits on the spectrum.
class ResonantError : public NumericalFailure {
 public:
  ResonantError(double lambda, const std::string& what)
      : NumericalFailure(what), lambda_(lambda) {}

  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

}  // namespace bresse
