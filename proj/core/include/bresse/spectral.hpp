#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "bresse/discretize.hpp"

namespace bresse {

inline constexpr int kDenseSolverCap = 3600;
inline constexpr double kResonanceTol = 1e-14;

using Complex = std::complex<double>;

/// Full spectrum of A, sorted by imaginary part (ties by real part).
/// Throws InvalidInput when dim() exceeds max_dim.
std::vector<Complex> eigenvalues(const DiscreteSystem& sys, int max_dim = kDenseSolverCap);

double spectral_abscissa(const std::vector<Complex>& eigs);

/// Largest real part among eigenvalues with |Im| <= cap. Falls back to the
/// full abscissa when no eigenvalue lies below the cap.
double resolved_abscissa(const std::vector<Complex>& eigs, double cap);

/// Upper end of the trustworthy frequency range: 0.5 * c_min * pi / h. Each
/// wave branch of the staggered grid saturates at 2c/h, so the slowest one
/// sets the edge.
double frequency_cap(const DiscreteSystem& sys);

/// Energy-norm resolvent ||(i lambda - A)^{-1}||. The generator is brought
/// to real Schur form once (after the similarity F A F^{-1} with M = F^T F);
/// every evaluation then costs a few quasi-triangular solves. Evaluations are
/// const and safe to run concurrently.
class ResolventEvaluator {
 public:
  explicit ResolventEvaluator(const DiscreteSystem& sys, int max_dim = kDenseSolverCap);

  /// Throws ResonantError if i*lambda is (numerically) an eigenvalue.
  double norm(double lambda) const;

  const std::vector<Complex>& eigenvalues() const { return eigs_; }
  int dim() const { return d_; }

 private:
  struct Workspace;
  void solve(Workspace& w, double lambda) const;
  void solve_adjoint(Workspace& w, double lambda) const;

  int d_ = 0;
  std::vector<double> schur_;      ///< column-major quasi-triangular factor
  std::vector<int> block_start_;   ///< 1 where a 2x2 diagonal block starts
  std::vector<Complex> eigs_;
  double scale_ = 1.0;
};

/// Convenience wrapper; builds a fresh evaluator.
double resolvent_norm(const DiscreteSystem& sys, double lambda);

struct AxisSample {
  double lambda = 0.0;
  double r = 0.0;
};

struct AxisScan {
  std::vector<AxisSample> samples;
  std::size_t argmax = 0;
};

/// Lambdas must be positive and strictly increasing. Runs on up to
/// `threads` workers; results come back in grid order.
AxisScan scan_axis(const ResolventEvaluator& eval, const std::vector<double>& lambdas,
                   int threads = 1);
AxisScan scan_axis(const DiscreteSystem& sys, const std::vector<double>& lambdas,
                   int threads = 1);

std::vector<double> log_grid(double lo, double hi, int count);

struct GrowthFit {
  double alpha = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int samples = 0;
};

inline constexpr int kMinGrowthSamples = 8;

/// Least-squares slope of log r against log lambda over the samples with
/// lambda >= lambda_max * 10^{-window_decades}, with a 95% Student-t
/// interval. Throws InvalidInput with fewer than kMinGrowthSamples samples
/// in the window or a degenerate lambda range.
GrowthFit fit_growth_exponent(const std::vector<AxisSample>& samples,
                              double window_decades = 0.5);

/// max r over the top decade of the lambda range divided by max r over the
/// bottom decade.
double growth_ratio(const std::vector<AxisSample>& samples);

struct SpectrumOptions {
  double lambda_min = 1.0;
  std::optional<double> lambda_max;  ///< defaults to frequency_cap()
  int count = 60;
  double window_decades = 0.5;
  int threads = 1;
  int max_dim = kDenseSolverCap;
};

struct SpectralReport {
  std::vector<Complex> eigenvalues;
  double spectral_abscissa = 0.0;
  double resolved_abscissa = 0.0;
  double frequency_cap = 0.0;
  std::vector<AxisSample> axis_samples;  ///< base grid plus near-resonant points
  std::vector<AxisSample> envelope;      ///< per-grid-cell maxima
  std::size_t argmax = 0;                ///< index into axis_samples
  std::optional<GrowthFit> growth;
  std::string growth_error;              ///< why growth is absent, if it is
  double growth_ratio = 0.0;
  bool conservative = false;             ///< a0 = 0
};

/// Eigenvalues, resolvent scan and growth fit in one pass. For damped
/// systems the log grid is refined with the imaginary parts of the most
/// weakly damped eigenvalue in each grid cell, so resonance peaks are not
/// stepped over. Undamped systems skip the refinement (the resolvent is
/// singular there) and are flagged as conservative.
SpectralReport analyze(const DiscreteSystem& sys, const SpectrumOptions& options = {});

}  // namespace bresse
