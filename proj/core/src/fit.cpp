#include "bresse/fit.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "bresse/errors.hpp"
#include "least_squares.hpp"

namespace bresse {

namespace {

struct WindowData {
  std::vector<double> t, e;
  FitWindow window;
};

WindowData select(const EnergyTimeSeries& series, std::optional<FitWindow> window) {
  if (series.times.size() != series.energy.size()) {
    throw InvalidInput("energy series has mismatched columns");
  }
  const FitWindow w = window.value_or(tail_window(series));
  if (!(w.t_hi > w.t_lo)) throw InvalidInput("fit window needs t_hi > t_lo");
  WindowData out;
  out.window = w;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < w.t_lo || t > w.t_hi) continue;
    if (!(series.energy[i] > 0.0)) {
      throw InvalidInput("fit window contains non-positive energy");
    }
    out.t.push_back(t);
    out.e.push_back(series.energy[i]);
  }
  if (static_cast<int>(out.t.size()) < kMinFitSamples) {
    std::ostringstream msg;
    msg << "fit window [" << w.t_lo << ", " << w.t_hi << "] holds " << out.t.size()
        << " samples, need " << kMinFitSamples;
    throw InvalidInput(msg.str());
  }
  return out;
}

double initial_energy(const EnergyTimeSeries& series) {
  return series.energy.empty() ? 0.0 : series.energy.front();
}

std::vector<double> logs(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::log(v[i]);
  return out;
}

DecayFit make_fit(const detail::LineFit& line, DecayKind law, const WindowData& data,
                  double e0) {
  DecayFit fit;
  fit.law = law;
  fit.rate = -line.slope;
  fit.prefactor = std::exp(line.intercept);
  fit.relative_prefactor = e0 > 0.0 ? fit.prefactor / e0 : 0.0;
  fit.r_squared = line.r_squared;
  fit.window = data.window;
  fit.samples = line.samples;
  return fit;
}

}  // namespace

FitWindow tail_window(const EnergyTimeSeries& series) {
  if (series.times.empty()) throw InvalidInput("empty energy series");
  const double t0 = series.times.front(), t1 = series.times.back();
  return {t0 + 2.0 * (t1 - t0) / 3.0, t1};
}

DecayFit fit_exponential(const EnergyTimeSeries& series, std::optional<FitWindow> window) {
  const WindowData data = select(series, window);
  const auto line = detail::fit_line(data.t, logs(data.e));
  return make_fit(line, DecayKind::Exponential, data, initial_energy(series));
}

DecayFit fit_polynomial(const EnergyTimeSeries& series, std::optional<FitWindow> window) {
  const WindowData data = select(series, window);
  if (!(data.t.front() > 1.0)) {
    throw InvalidInput("polynomial fit window must exclude t <= 1");
  }
  const auto line = detail::fit_line(logs(data.t), logs(data.e));
  const DecayKind law = -line.slope >= 0.75 ? DecayKind::PolynomialOne : DecayKind::PolynomialHalf;
  return make_fit(line, law, data, initial_energy(series));
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Exponential: return "Exponential";
    case Verdict::PolynomialOne: return "PolynomialOne";
    case Verdict::PolynomialHalf: return "PolynomialHalf";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

DecayClassification classify_decay(const EnergyTimeSeries& series,
                                   std::optional<FitWindow> window) {
  DecayClassification out;
  if (series.energy.size() < 2) {
    out.diagnostics = "series too short";
    return out;
  }
  const double e_first = series.energy.front(), e_last = series.energy.back();
  if (!(e_first > 0.0) || !(e_first - e_last > kMinRelativeDrop * e_first)) {
    out.diagnostics = "no decay: relative energy drop below threshold";
    return out;
  }
  try {
    out.exponential = fit_exponential(series, window);
  } catch (const InvalidInput& e) {
    out.diagnostics = std::string("exponential fit failed: ") + e.what();
    return out;
  }
  try {
    out.polynomial = fit_polynomial(series, window);
  } catch (const InvalidInput& e) {
    out.diagnostics = std::string("polynomial fit failed: ") + e.what();
    return out;
  }

  const double r2_exp = out.exponential->r_squared;
  const double r2_pol = out.polynomial->r_squared;
  const double u_exp = 1.0 - r2_exp, u_pol = 1.0 - r2_pol;
  const double lo = std::min(u_exp, u_pol), hi = std::max(u_exp, u_pol);
  const bool close_r2 = std::abs(r2_exp - r2_pol) < kTieDeltaR2;
  const bool close_variance = hi <= kTieVarianceRatio * lo;
  std::ostringstream diag;
  diag << "semilog r2=" << r2_exp << ", log-log r2=" << r2_pol;
  if (close_r2 && close_variance) {
    diag << "; fits indistinguishable";
    out.diagnostics = diag.str();
    return out;
  }
  out.diagnostics = diag.str();
  if (r2_exp >= r2_pol) {
    out.verdict = Verdict::Exponential;
  } else {
    out.verdict = out.polynomial->law == DecayKind::PolynomialOne ? Verdict::PolynomialOne
                                                                   : Verdict::PolynomialHalf;
  }
  return out;
}

double bt_map(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidInput("bt_map needs alpha > 0");
  return 2.0 / alpha;
}

}  // namespace bresse
