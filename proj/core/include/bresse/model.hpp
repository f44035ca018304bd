#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace bresse {

/// Material constants and geometry of the curved beam. All strictly positive.
struct BeamParameters {
  double rho1 = 1.0;    ///< mass density times cross-section area
  double rho2 = 1.0;    ///< mass density times second moment of area
  double kappa = 1.0;   ///< shear stiffness
  double kappa0 = 1.0;  ///< axial stiffness
  double b = 1.0;       ///< bending stiffness
  double l = 0.5;       ///< curvature (inverse radius)
  double L = 1.0;       ///< beam length

  friend bool operator==(const BeamParameters&, const BeamParameters&) = default;
};

/// Throws InvalidInput unless every field is finite and > 0.
void validate(const BeamParameters& p);

/// Largest of the three characteristic wave speeds.
double max_wave_speed(const BeamParameters& p);

/// Smallest of the three characteristic wave speeds.
double min_wave_speed(const BeamParameters& p);

enum class DampingShape { PiecewiseConstant, SmoothedPlateau };

/// Damping coefficient a(x): a0 on ]alpha, beta[, zero outside. The smoothed
/// variant replaces the jumps by linear ramps of width ramp_width inside the
/// support.
struct DampingProfile {
  double alpha = 0.25;
  double beta = 0.75;
  double a0 = 1.0;
  DampingShape shape = DampingShape::PiecewiseConstant;
  double ramp_width = 0.0;

  friend bool operator==(const DampingProfile&, const DampingProfile&) = default;
};

/// a0 = 0 is accepted and yields the conservative (undamped) system.
void validate(const DampingProfile& profile, double L);

/// Pointwise value a(x). Throws InvalidInput for x outside [0, L].
double damping_at(const DampingProfile& profile, double x, double L);

bool is_undamped(const DampingProfile& profile);

/// DNN: phi = psi_x = omega_x = 0 at both ends.
/// DDD: phi = psi = omega = 0 at both ends.
enum class BoundaryCondition { DNN, DDD };

enum class Regime { EqualSpeed, EqualKappaOnly, General };

enum class DecayKind { Exponential, PolynomialOne, PolynomialHalf };

/// Predicted energy decay together with the resolvent growth order on the
/// imaginary axis that produces it (0, 2 or 4).
struct DecayLaw {
  DecayKind kind = DecayKind::Exponential;
  double resolvent_order = 0.0;

  /// Energy decay exponent p in E(t) <= C t^{-p}; nullopt for exponential.
  std::optional<double> energy_exponent() const;

  friend bool operator==(const DecayLaw&, const DecayLaw&) = default;
};

inline constexpr double kRegimeRelTol = 1e-12;

Regime classify_regime(const BeamParameters& p);
DecayLaw predicted_decay(Regime r);

/// Outcome of the DNN non-degeneracy check L != n*pi/l.
struct Admissibility {
  bool ok = true;
  int nearest_n = 1;     ///< integer n minimizing |L - n*pi/l|
  double distance = 0.0; ///< |L - nearest_n*pi/l|
};

/// tol_abs defaults to 1e-9 * L when not given.
Admissibility check_dnn_admissible(const BeamParameters& p,
                                   std::optional<double> tol_abs = std::nullopt);

std::string_view to_string(BoundaryCondition bc);
std::string_view to_string(Regime r);
std::string_view to_string(DecayKind k);
std::string_view to_string(DampingShape s);

BoundaryCondition parse_boundary_condition(std::string_view s);
DampingShape parse_damping_shape(std::string_view s);

}  // namespace bresse
