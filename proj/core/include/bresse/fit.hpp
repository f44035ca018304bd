#pragma once

#include <optional>
#include <string>

#include "bresse/evolve.hpp"
#include "bresse/model.hpp"

namespace bresse {

struct FitWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// Least-squares decay fit. For exponential fits rate is omega in
/// E ~ prefactor * exp(-omega t); for polynomial fits rate is p in
/// E ~ prefactor * t^{-p}. relative_prefactor divides by E(0).
struct DecayFit {
  DecayKind law = DecayKind::Exponential;
  double rate = 0.0;
  double prefactor = 0.0;
  double relative_prefactor = 0.0;
  double r_squared = 0.0;
  FitWindow window;
  int samples = 0;
};

inline constexpr int kMinFitSamples = 8;

/// Final third of the series' time span.
FitWindow tail_window(const EnergyTimeSeries& series);

/// Line through (t, log E). Throws InvalidInput for fewer than
/// kMinFitSamples samples in the window or non-positive energies.
DecayFit fit_exponential(const EnergyTimeSeries& series,
                         std::optional<FitWindow> window = std::nullopt);

/// Line through (log t, log E). The window must lie in t > 1. law is
/// PolynomialOne for p >= 0.75, PolynomialHalf otherwise.
DecayFit fit_polynomial(const EnergyTimeSeries& series,
                        std::optional<FitWindow> window = std::nullopt);

enum class Verdict { Exponential, PolynomialOne, PolynomialHalf, Inconclusive };

std::string_view to_string(Verdict v);

struct DecayClassification {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<DecayFit> exponential;
  std::optional<DecayFit> polynomial;
  std::string diagnostics;
};

/// Relative energy drop below which a series counts as not decaying.
inline constexpr double kMinRelativeDrop = 1e-6;
inline constexpr double kTieDeltaR2 = 0.01;
inline constexpr double kTieVarianceRatio = 10.0;

/// Compares the semilog and log-log fits on the window (tail third by
/// default) and keeps the one with the higher r^2. A tie requires both
/// |delta r^2| < kTieDeltaR2 and unexplained variances (1 - r^2) within a
/// factor kTieVarianceRatio of each other; ties and non-decaying series are
/// Inconclusive.
DecayClassification classify_decay(const EnergyTimeSeries& series,
                                   std::optional<FitWindow> window = std::nullopt);

/// Energy decay exponent implied by resolvent growth |lambda|^alpha: 2/alpha.
double bt_map(double alpha);

}  // namespace bresse
