#include "bresse/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bresse/errors.hpp"

namespace bresse {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

bool nearly_equal(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace

void validate(const BeamParameters& p) {
  const std::pair<const char*, double> fields[] = {
      {"rho1", p.rho1}, {"rho2", p.rho2}, {"kappa", p.kappa}, {"kappa0", p.kappa0},
      {"b", p.b},       {"l", p.l},       {"L", p.L}};
  for (const auto& [name, value] : fields) {
    if (!positive_finite(value)) {
      std::ostringstream msg;
      msg << "beam parameter " << name << " must be finite and > 0 (got " << value << ")";
      throw InvalidInput(msg.str());
    }
  }
}

double max_wave_speed(const BeamParameters& p) {
  return std::sqrt(std::max({p.kappa / p.rho1, p.b / p.rho2, p.kappa0 / p.rho1}));
}

double min_wave_speed(const BeamParameters& p) {
  return std::sqrt(std::min({p.kappa / p.rho1, p.b / p.rho2, p.kappa0 / p.rho1}));
}

void validate(const DampingProfile& profile, double L) {
  std::ostringstream msg;
  if (!(std::isfinite(profile.alpha) && std::isfinite(profile.beta)) ||
      !(0.0 <= profile.alpha && profile.alpha < profile.beta && profile.beta <= L)) {
    msg << "damping support must satisfy 0 <= alpha < beta <= L (alpha=" << profile.alpha
        << ", beta=" << profile.beta << ", L=" << L << ")";
    throw InvalidInput(msg.str());
  }
  if (!std::isfinite(profile.a0) || profile.a0 < 0.0) {
    msg << "damping floor a0 must be finite and >= 0 (got " << profile.a0 << ")";
    throw InvalidInput(msg.str());
  }
  if (profile.shape == DampingShape::SmoothedPlateau) {
    if (!positive_finite(profile.ramp_width) ||
        2.0 * profile.ramp_width >= profile.beta - profile.alpha) {
      msg << "ramp_width must be > 0 and leave a plateau inside ]alpha, beta[ (got "
          << profile.ramp_width << ")";
      throw InvalidInput(msg.str());
    }
  }
}

double damping_at(const DampingProfile& profile, double x, double L) {
  if (!(x >= 0.0 && x <= L)) {
    std::ostringstream msg;
    msg << "damping_at: x=" << x << " outside [0, " << L << "]";
    throw InvalidInput(msg.str());
  }
  if (x <= profile.alpha || x >= profile.beta) return 0.0;
  if (profile.shape == DampingShape::PiecewiseConstant) return profile.a0;
  const double inset = std::min(x - profile.alpha, profile.beta - x);
  return profile.a0 * std::min(1.0, inset / profile.ramp_width);
}

bool is_undamped(const DampingProfile& profile) { return profile.a0 == 0.0; }

std::optional<double> DecayLaw::energy_exponent() const {
  if (resolvent_order <= 0.0) return std::nullopt;
  return 2.0 / resolvent_order;
}

Regime classify_regime(const BeamParameters& p) {
  if (!nearly_equal(p.kappa, p.kappa0, kRegimeRelTol)) return Regime::General;
  // rho1/rho2 == kappa/b, compared cross-multiplied to avoid a division.
  if (nearly_equal(p.rho1 * p.b, p.kappa * p.rho2, kRegimeRelTol)) return Regime::EqualSpeed;
  return Regime::EqualKappaOnly;
}

DecayLaw predicted_decay(Regime r) {
  switch (r) {
    case Regime::EqualSpeed:
      return {DecayKind::Exponential, 0.0};
    case Regime::EqualKappaOnly:
      return {DecayKind::PolynomialOne, 2.0};
    case Regime::General:
      return {DecayKind::PolynomialHalf, 4.0};
  }
  return {};
}

Admissibility check_dnn_admissible(const BeamParameters& p, std::optional<double> tol_abs) {
  const double tol = tol_abs.value_or(1e-9 * p.L);
  const double period = std::numbers::pi / p.l;
  const int n = std::max(1, static_cast<int>(std::lround(p.L / period)));
  Admissibility out;
  out.nearest_n = n;
  out.distance = std::abs(p.L - n * period);
  out.ok = out.distance > tol;
  return out;
}

std::string_view to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::DNN ? "DNN" : "DDD";
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::EqualSpeed:
      return "EqualSpeed";
    case Regime::EqualKappaOnly:
      return "EqualKappaOnly";
    case Regime::General:
      return "General";
  }
  return "?";
}

std::string_view to_string(DecayKind k) {
  switch (k) {
    case DecayKind::Exponential:
      return "Exponential";
    case DecayKind::PolynomialOne:
      return "PolynomialOne";
    case DecayKind::PolynomialHalf:
      return "PolynomialHalf";
  }
  return "?";
}

std::string_view to_string(DampingShape s) {
  return s == DampingShape::PiecewiseConstant ? "PiecewiseConstant" : "SmoothedPlateau";
}

BoundaryCondition parse_boundary_condition(std::string_view s) {
  if (s == "DNN") return BoundaryCondition::DNN;
  if (s == "DDD") return BoundaryCondition::DDD;
  throw InvalidInput("unknown boundary condition '" + std::string(s) + "' (expected DNN or DDD)");
}

DampingShape parse_damping_shape(std::string_view s) {
  if (s == "PiecewiseConstant") return DampingShape::PiecewiseConstant;
  if (s == "SmoothedPlateau") return DampingShape::SmoothedPlateau;
  throw InvalidInput("unknown damping shape '" + std::string(s) + "'");
}

}  // namespace bresse
