#include <gtest/gtest.h>

#include <cmath>

#include "bresse/errors.hpp"
#include "bresse/model.hpp"
#include "test_support.hpp"

using namespace bresse;

TEST(Regime, UnitParametersAreEqualSpeed) {
  EXPECT_EQ(classify_regime(BeamParameters{}), Regime::EqualSpeed);
}

TEST(Regime, EqualKappaWithMismatchedRatio) {
  BeamParameters p;
  p.b = 2.0;
  EXPECT_EQ(classify_regime(p), Regime::EqualKappaOnly);
}

TEST(Regime, DifferentKappaIsGeneral) {
  BeamParameters p;
  p.kappa0 = 2.0;
  EXPECT_EQ(classify_regime(p), Regime::General);
  p.b = 2.0;
  EXPECT_EQ(classify_regime(p), Regime::General);
}

TEST(Regime, RatioConditionUsesRelativeTolerance) {
  BeamParameters p;
  p.rho1 = 3.0;
  p.kappa = 0.7;
  p.kappa0 = 0.7;
  p.rho2 = 1.3;
  p.b = p.kappa * p.rho2 / p.rho1;
  EXPECT_EQ(classify_regime(p), Regime::EqualSpeed);
  p.b *= 1.0 + 1e-9;
  EXPECT_EQ(classify_regime(p), Regime::EqualKappaOnly);
}

TEST(PredictedDecay, OrdersMatchRegimes) {
  EXPECT_EQ(predicted_decay(Regime::EqualSpeed).kind, DecayKind::Exponential);
  EXPECT_EQ(predicted_decay(Regime::EqualSpeed).resolvent_order, 0.0);
  EXPECT_FALSE(predicted_decay(Regime::EqualSpeed).energy_exponent().has_value());
  EXPECT_EQ(predicted_decay(Regime::EqualKappaOnly).kind, DecayKind::PolynomialOne);
  EXPECT_EQ(predicted_decay(Regime::EqualKappaOnly).resolvent_order, 2.0);
  EXPECT_EQ(*predicted_decay(Regime::EqualKappaOnly).energy_exponent(), 1.0);
  EXPECT_EQ(predicted_decay(Regime::General).kind, DecayKind::PolynomialHalf);
  EXPECT_EQ(predicted_decay(Regime::General).resolvent_order, 4.0);
  EXPECT_EQ(*predicted_decay(Regime::General).energy_exponent(), 0.5);
}

TEST(Parameters, RejectNonPositiveAndNonFinite) {
  BeamParameters p;
  p.kappa = 0.0;
  EXPECT_THROW(validate(p), InvalidInput);
  p = {};
  p.l = -1.0;
  EXPECT_THROW(validate(p), InvalidInput);
  p = {};
  p.rho2 = std::nan("");
  EXPECT_THROW(validate(p), InvalidInput);
  EXPECT_NO_THROW(validate(BeamParameters{}));
}

TEST(Parameters, MaxWaveSpeed) {
  BeamParameters p;
  p.kappa0 = 4.0;
  EXPECT_DOUBLE_EQ(max_wave_speed(p), 2.0);
  p = {};
  p.b = 9.0;
  p.rho2 = 1.0;
  EXPECT_DOUBLE_EQ(max_wave_speed(p), 3.0);
}

TEST(Parameters, MinWaveSpeed) {
  BeamParameters p;
  p.rho1 = 4.0;
  p.kappa0 = 4.0;
  EXPECT_DOUBLE_EQ(min_wave_speed(p), 0.5);
  EXPECT_DOUBLE_EQ(max_wave_speed(p), 1.0);
}

TEST(Admissibility, DetectsDegenerateLength) {
  BeamParameters p;
  p.l = 1.0;
  p.L = M_PI;
  const auto adm = check_dnn_admissible(p);
  EXPECT_FALSE(adm.ok);
  EXPECT_EQ(adm.nearest_n, 1);
  p.L = 2.0 * M_PI / p.l;
  EXPECT_FALSE(check_dnn_admissible(p).ok);
  p.L = 3.0;
  EXPECT_TRUE(check_dnn_admissible(p).ok);
  EXPECT_TRUE(check_dnn_admissible(BeamParameters{}).ok);
}

TEST(Damping, PiecewiseConstantOnOpenSupport) {
  const auto prof = testing_support::centre_damping(2.0);
  EXPECT_EQ(damping_at(prof, 0.5, 1.0), 2.0);
  EXPECT_EQ(damping_at(prof, 0.25, 1.0), 0.0);
  EXPECT_EQ(damping_at(prof, 0.75, 1.0), 0.0);
  EXPECT_EQ(damping_at(prof, 0.1, 1.0), 0.0);
  EXPECT_THROW(damping_at(prof, 1.5, 1.0), InvalidInput);
}

TEST(Damping, SmoothedPlateauRamps) {
  auto prof = testing_support::centre_damping(1.0);
  prof.shape = DampingShape::SmoothedPlateau;
  prof.ramp_width = 0.1;
  EXPECT_NEAR(damping_at(prof, 0.30, 1.0), 0.5, 1e-12);
  EXPECT_NEAR(damping_at(prof, 0.5, 1.0), 1.0, 1e-12);
  EXPECT_NEAR(damping_at(prof, 0.70, 1.0), 0.5, 1e-12);
}

TEST(Damping, ValidationAndUndamped) {
  DampingProfile prof;
  prof.alpha = 0.8;
  prof.beta = 0.2;
  EXPECT_THROW(validate(prof, 1.0), InvalidInput);
  prof = {};
  prof.beta = 2.0;
  EXPECT_THROW(validate(prof, 1.0), InvalidInput);
  prof = {};
  prof.a0 = 0.0;
  EXPECT_NO_THROW(validate(prof, 1.0));
  EXPECT_TRUE(is_undamped(prof));
  prof.alpha = 0.0;
  prof.a0 = 1.0;
  EXPECT_NO_THROW(validate(prof, 1.0));
  EXPECT_FALSE(is_undamped(prof));
}

TEST(Names, RoundTrip) {
  EXPECT_EQ(parse_boundary_condition(to_string(BoundaryCondition::DNN)), BoundaryCondition::DNN);
  EXPECT_EQ(parse_boundary_condition("DDD"), BoundaryCondition::DDD);
  EXPECT_THROW(parse_boundary_condition("NNN"), InvalidInput);
  EXPECT_EQ(parse_damping_shape(to_string(DampingShape::SmoothedPlateau)),
            DampingShape::SmoothedPlateau);
}
