#include "bresse/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "bresse/errors.hpp"
#include "bresse/parallel.hpp"
#include "least_squares.hpp"

namespace bresse {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_dim(int d, int max_dim) {
  if (d > max_dim) {
    std::ostringstream msg;
    msg << "state dimension " << d << " exceeds the dense solver cap " << max_dim
        << "; use a smaller n";
    throw InvalidInput(msg.str());
  }
}

// F A F^{-1} with M = F^T F, so that Euclidean norms of the result are
// energy norms of the original operator.
MatrixXd energy_similarity(const DiscreteSystem& sys) {
  const Eigen::LLT<MatrixXd> llt(sys.M);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("energy Gram matrix is not positive definite");
  }
  const MatrixXd x = llt.matrixL().solve(sys.A.transpose());
  return (x * llt.matrixL()).transpose();
}

struct RealSchur {
  MatrixXd T;
  std::vector<Complex> eigs;
};

RealSchur real_schur(MatrixXd a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  std::vector<double> wr(n), wi(n);
  double vs_dummy = 0.0;
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'N', 'N', nullptr, n, a.data(), n,
                                        &sdim, wr.data(), wi.data(), &vs_dummy, 1);
  if (info != 0) {
    throw NumericalFailure("real Schur decomposition failed (LAPACK info " +
                           std::to_string(info) + ")");
  }
  RealSchur out;
  out.T = std::move(a);
  out.eigs.reserve(n);
  for (lapack_int i = 0; i < n; ++i) out.eigs.emplace_back(wr[i], wi[i]);
  return out;
}

void sort_by_imag(std::vector<Complex>& eigs) {
  std::sort(eigs.begin(), eigs.end(), [](const Complex& a, const Complex& b) {
    if (a.imag() != b.imag()) return a.imag() < b.imag();
    return a.real() < b.real();
  });
}

// Raw mt19937_64 output is fully specified, so the start vector is the same
// on every platform.
VectorXd start_vector(int d) {
  std::mt19937_64 rng(0x5eed);
  VectorXd v(2 * d);
  for (int i = 0; i < 2 * d; ++i) {
    v(i) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  }
  return v / v.norm();
}

constexpr double kLanczosTol = 1e-13;

}  // namespace

std::vector<Complex> eigenvalues(const DiscreteSystem& sys, int max_dim) {
  check_dim(sys.dim(), max_dim);
  std::vector<Complex> eigs = real_schur(sys.A).eigs;
  sort_by_imag(eigs);
  return eigs;
}

double spectral_abscissa(const std::vector<Complex>& eigs) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& z : eigs) m = std::max(m, z.real());
  return m;
}

double resolved_abscissa(const std::vector<Complex>& eigs, double cap) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& z : eigs) {
    if (std::abs(z.imag()) <= cap) m = std::max(m, z.real());
  }
  return std::isfinite(m) ? m : spectral_abscissa(eigs);
}

double frequency_cap(const DiscreteSystem& sys) {
  return 0.5 * min_wave_speed(sys.params) * M_PI / sys.grid.h;
}

// Complex vectors are stored as [re; im] in one real vector of length 2d.
struct ResolventEvaluator::Workspace {
  explicit Workspace(int d) : re(d), im(d) {}
  VectorXd re, im;
};

ResolventEvaluator::ResolventEvaluator(const DiscreteSystem& sys, int max_dim) : d_(sys.dim()) {
  check_dim(d_, max_dim);
  RealSchur schur = real_schur(energy_similarity(sys));
  eigs_ = std::move(schur.eigs);
  sort_by_imag(eigs_);

  block_start_.assign(d_, 0);
  for (int j = 0; j + 1 < d_; ++j) {
    if (schur.T(j + 1, j) != 0.0) {
      block_start_[j] = 1;
      ++j;
    }
  }
  scale_ = std::max(1.0, schur.T.cwiseAbs().maxCoeff());
  schur_.assign(schur.T.data(), schur.T.data() + static_cast<std::size_t>(d_) * d_);
}

// Back substitution for (i lambda - T) x = b, in place.
void ResolventEvaluator::solve(Workspace& w, double lambda) const {
  const Eigen::Map<const MatrixXd> T(schur_.data(), d_, d_);
  auto& re = w.re;
  auto& im = w.im;
  int j = d_ - 1;
  while (j >= 0) {
    if (j >= 1 && block_start_[j - 1]) {
      const int k = j - 1;
      const Complex s00(-T(k, k), lambda), s01(-T(k, j), 0.0);
      const Complex s10(-T(j, k), 0.0), s11(-T(j, j), lambda);
      const Complex b0(re(k), im(k)), b1(re(j), im(j));
      const Complex det = s00 * s11 - s01 * s10;
      const Complex x0 = (s11 * b0 - s01 * b1) / det;
      const Complex x1 = (s00 * b1 - s10 * b0) / det;
      re(k) = x0.real(), im(k) = x0.imag();
      re(j) = x1.real(), im(j) = x1.imag();
      re.head(k).noalias() += x0.real() * T.col(k).head(k) + x1.real() * T.col(j).head(k);
      im.head(k).noalias() += x0.imag() * T.col(k).head(k) + x1.imag() * T.col(j).head(k);
      j -= 2;
    } else {
      const Complex x = Complex(re(j), im(j)) / Complex(-T(j, j), lambda);
      re(j) = x.real(), im(j) = x.imag();
      re.head(j).noalias() += x.real() * T.col(j).head(j);
      im.head(j).noalias() += x.imag() * T.col(j).head(j);
      j -= 1;
    }
  }
}

// Forward substitution for (i lambda - T)^H y = c, in place.
void ResolventEvaluator::solve_adjoint(Workspace& w, double lambda) const {
  const Eigen::Map<const MatrixXd> T(schur_.data(), d_, d_);
  auto& re = w.re;
  auto& im = w.im;
  int j = 0;
  while (j < d_) {
    if (block_start_[j]) {
      const int k = j + 1;
      const Complex r0(re(j) + T.col(j).head(j).dot(re.head(j)),
                       im(j) + T.col(j).head(j).dot(im.head(j)));
      const Complex r1(re(k) + T.col(k).head(j).dot(re.head(j)),
                       im(k) + T.col(k).head(j).dot(im.head(j)));
      // Conjugate transpose of the 2x2 block of i lambda - T.
      const Complex a00(-T(j, j), -lambda), a01(-T(k, j), 0.0);
      const Complex a10(-T(j, k), 0.0), a11(-T(k, k), -lambda);
      const Complex det = a00 * a11 - a01 * a10;
      const Complex y0 = (a11 * r0 - a01 * r1) / det;
      const Complex y1 = (a00 * r1 - a10 * r0) / det;
      re(j) = y0.real(), im(j) = y0.imag();
      re(k) = y1.real(), im(k) = y1.imag();
      j += 2;
    } else {
      const Complex r(re(j) + T.col(j).head(j).dot(re.head(j)),
                      im(j) + T.col(j).head(j).dot(im.head(j)));
      const Complex y = r / Complex(-T(j, j), -lambda);
      re(j) = y.real(), im(j) = y.imag();
      j += 1;
    }
  }
}

// Largest eigenvalue of G = S^{-H} S^{-1} by Lanczos with full
// reorthogonalization; ||S^{-1}|| = sqrt(lambda_max(G)).
double ResolventEvaluator::norm(double lambda) const {
  if (!std::isfinite(lambda)) throw InvalidInput("lambda must be finite");
  const int d = d_;
  const int max_iter = 2 * d;  // G is Hermitian on C^d, i.e. symmetric on R^{2d}
  Workspace w(d);

  std::vector<VectorXd> basis;
  std::vector<double> alpha, beta;
  VectorXd v = start_vector(d);
  double theta = 0.0;

  // Complex Hermitian G acting on [re; im] is a real symmetric operator, so
  // real Lanczos in R^{2d} applies directly.
  auto apply = [&](const VectorXd& x) {
    w.re = x.head(d);
    w.im = x.tail(d);
    solve(w, lambda);
    solve_adjoint(w, lambda);
    VectorXd y(2 * d);
    y << w.re, w.im;
    return y;
  };

  for (int k = 0; k < max_iter; ++k) {
    basis.push_back(v);
    VectorXd y = apply(v);
    if (!y.allFinite()) throw ResonantError(lambda, "resolvent is singular at this frequency");
    alpha.push_back(v.dot(y));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) y -= b.dot(y) * b;
    }
    const double bnext = y.norm();

    const int m = static_cast<int>(alpha.size());
    VectorXd diag = Eigen::Map<const VectorXd>(alpha.data(), m);
    VectorXd sub = m > 1 ? VectorXd(Eigen::Map<const VectorXd>(beta.data(), m - 1))
                         : VectorXd(0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    theta = tri.eigenvalues()(m - 1);
    const double residual = bnext * std::abs(tri.eigenvectors()(m - 1, m - 1));

    if (residual <= kLanczosTol * theta || bnext <= kLanczosTol * theta) break;
    beta.push_back(bnext);
    v = y / bnext;
  }

  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw ResonantError(lambda, "resolvent is singular at this frequency");
  }
  const double sigma_min = 1.0 / std::sqrt(theta);
  if (sigma_min < kResonanceTol * std::max(scale_, std::abs(lambda))) {
    std::ostringstream msg;
    msg << "resonant: i*lambda is numerically an eigenvalue (lambda=" << lambda
        << ", sigma_min=" << sigma_min << ")";
    throw ResonantError(lambda, msg.str());
  }
  return std::sqrt(theta);
}

double resolvent_norm(const DiscreteSystem& sys, double lambda) {
  return ResolventEvaluator(sys).norm(lambda);
}

namespace {

void check_grid(const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw InvalidInput("lambda grid is empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i])) {
      throw InvalidInput("lambda grid must be positive and finite");
    }
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) {
      throw InvalidInput("lambda grid must be strictly increasing");
    }
  }
}

std::size_t argmax_of(const std::vector<AxisSample>& s) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].r > s[best].r) best = i;
  }
  return best;
}

}  // namespace

AxisScan scan_axis(const ResolventEvaluator& eval, const std::vector<double>& lambdas,
                   int threads) {
  check_grid(lambdas);
  AxisScan scan;
  scan.samples.resize(lambdas.size());
  parallel_for(lambdas.size(), threads, [&](std::size_t i) {
    scan.samples[i] = {lambdas[i], eval.norm(lambdas[i])};
  });
  scan.argmax = argmax_of(scan.samples);
  return scan;
}

AxisScan scan_axis(const DiscreteSystem& sys, const std::vector<double>& lambdas, int threads) {
  return scan_axis(ResolventEvaluator(sys), lambdas, threads);
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (count < 1) throw InvalidInput("lambda grid count must be >= 1");
  if (!(lo > 0.0) || !std::isfinite(hi)) throw InvalidInput("lambda grid bounds must be positive");
  if (count == 1) return {lo};
  if (!(hi > lo)) throw InvalidInput("lambda grid needs max > min");
  std::vector<double> g(count);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) {
    g[i] = std::exp(a + (b - a) * i / (count - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

GrowthFit fit_growth_exponent(const std::vector<AxisSample>& samples, double window_decades) {
  if (!(window_decades > 0.0)) throw InvalidInput("growth window must be > 0 decades");
  if (samples.empty()) throw InvalidInput("no axis samples to fit");
  double top = 0.0;
  for (const auto& s : samples) top = std::max(top, s.lambda);
  const double lo = top * std::pow(10.0, -window_decades);
  std::vector<double> x, y;
  for (const auto& s : samples) {
    if (s.lambda >= lo && s.lambda > 0.0 && s.r > 0.0) {
      x.push_back(std::log(s.lambda));
      y.push_back(std::log(s.r));
    }
  }
  if (static_cast<int>(x.size()) < kMinGrowthSamples) {
    std::ostringstream msg;
    msg << "degenerate growth window: " << x.size() << " samples, need "
        << kMinGrowthSamples;
    throw InvalidInput(msg.str());
  }
  const detail::LineFit line = detail::fit_line(x, y);
  const double half = detail::t_quantile_95(line.samples - 2) * line.slope_stderr;
  return {line.slope, line.slope - half, line.slope + half, line.samples};
}

double growth_ratio(const std::vector<AxisSample>& samples) {
  if (samples.empty()) throw InvalidInput("no axis samples");
  double lo = samples.front().lambda, hi = lo;
  for (const auto& s : samples) {
    lo = std::min(lo, s.lambda);
    hi = std::max(hi, s.lambda);
  }
  double top = 0.0, bottom = 0.0;
  for (const auto& s : samples) {
    if (s.lambda >= hi / 10.0) top = std::max(top, s.r);
    if (s.lambda <= lo * 10.0) bottom = std::max(bottom, s.r);
  }
  return top / bottom;
}

SpectralReport analyze(const DiscreteSystem& sys, const SpectrumOptions& options) {
  const ResolventEvaluator eval(sys, options.max_dim);
  SpectralReport rep;
  rep.eigenvalues = eval.eigenvalues();
  rep.spectral_abscissa = spectral_abscissa(rep.eigenvalues);
  rep.frequency_cap = frequency_cap(sys);
  rep.resolved_abscissa = resolved_abscissa(rep.eigenvalues, rep.frequency_cap);
  rep.conservative = is_undamped(sys.profile);

  const double hi = options.lambda_max.value_or(rep.frequency_cap);
  const std::vector<double> grid = log_grid(options.lambda_min, hi, options.count);

  std::vector<double> lambdas = grid;
  if (!rep.conservative && grid.size() > 1) {
    for (std::size_t c = 0; c + 1 < grid.size(); ++c) {
      const Complex* best = nullptr;
      for (const auto& z : rep.eigenvalues) {
        if (z.imag() > grid[c] && z.imag() < grid[c + 1] &&
            (!best || std::abs(z.real()) < std::abs(best->real()))) {
          best = &z;
        }
      }
      if (best) lambdas.push_back(best->imag());
    }
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  }

  std::vector<double> r(lambdas.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(lambdas.size(), options.threads, [&](std::size_t i) {
    try {
      r[i] = eval.norm(lambdas[i]);
    } catch (const ResonantError&) {
      if (!rep.conservative) throw;
    }
  });
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (std::isfinite(r[i])) rep.axis_samples.push_back({lambdas[i], r[i]});
  }
  if (rep.axis_samples.empty()) {
    throw NumericalFailure("every scan frequency was resonant");
  }
  rep.argmax = argmax_of(rep.axis_samples);

  // Envelope: the largest sample in each cell [g_c, g_{c+1}); the last cell
  // is closed so the top grid point is included.
  const std::size_t cells = grid.size() > 1 ? grid.size() - 1 : 1;
  for (std::size_t c = 0; c < cells; ++c) {
    const AxisSample* best = nullptr;
    for (const auto& s : rep.axis_samples) {
      const bool inside = grid.size() == 1 ||
                          (s.lambda >= grid[c] &&
                           (s.lambda < grid[c + 1] || (c + 1 == cells && s.lambda <= grid[c + 1])));
      if (inside && (!best || s.r > best->r)) best = &s;
    }
    if (best) rep.envelope.push_back(*best);
  }

  try {
    rep.growth = fit_growth_exponent(rep.envelope, options.window_decades);
  } catch (const InvalidInput& e) {
    rep.growth_error = e.what();
  }
  rep.growth_ratio = growth_ratio(rep.axis_samples);
  return rep;
}

}  // namespace bresse
