#include <gtest/gtest.h>

#include <cmath>

#include "bresse/errors.hpp"
#include "bresse/evolve.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace bresse;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing_support::centre_damping;

namespace {

BeamParameters mixed_params() {
  BeamParameters p;
  p.kappa0 = 1.8;
  p.b = 1.4;
  p.rho2 = 0.9;
  return p;
}

}  // namespace

TEST(Cayley, EachUndampedModeRotatesByScalarAngle) {
  for (const auto bc : {BoundaryCondition::DDD, BoundaryCondition::DNN}) {
    const auto sys = assemble(mixed_params(), centre_damping(0.0), bc, 12);
    const double dt = 0.03;
    const CayleyStepper stepper(sys, dt);
    const UndampedModes modes = undamped_modes(sys);
    const int m = sys.layout.displacement_dim();
    for (int k = 0; k < modes.frequencies.size(); ++k) {
      const double w = modes.frequencies(k);
      VectorXd e1 = VectorXd::Zero(sys.dim()), e2 = VectorXd::Zero(sys.dim());
      e1.head(m) = modes.shapes.col(k);
      e2.tail(m) = w * modes.shapes.col(k);
      const double theta = oracle::cayley_angle(w, dt);
      const VectorXd expected = std::cos(theta) * e1 - std::sin(theta) * e2;
      const VectorXd got = stepper.step(e1);
      EXPECT_LE((got - expected).norm(), 1e-12 * e1.norm()) << to_string(bc) << " mode " << k;
    }
  }
}

TEST(Cayley, SparseAndDenseSolversAgree) {
  const auto sys = assemble(mixed_params(), centre_damping(), BoundaryCondition::DDD, 20);
  const double dt = 0.01;
  const CayleyStepper stepper(sys, dt);
  EXPECT_TRUE(stepper.uses_sparse_solver());
  const MatrixXd id = MatrixXd::Identity(sys.dim(), sys.dim());
  const MatrixXd dense = (id - 0.5 * dt * sys.A).partialPivLu().solve(id + 0.5 * dt * sys.A);
  const VectorXd U = VectorXd::LinSpaced(sys.dim(), 0.5, -1.0);
  EXPECT_LE((stepper.step(U) - dense * U).norm(), 1e-12 * U.norm());
  EXPECT_LE((step(sys, U, dt) - dense * U).norm(), 1e-12 * U.norm());
}

TEST(Cayley, ZeroStaysZero) {
  const auto sys = assemble(BeamParameters{}, centre_damping(), BoundaryCondition::DNN, 8);
  const VectorXd zero = VectorXd::Zero(sys.dim());
  EXPECT_EQ(CayleyStepper(sys, 0.1).step(zero), zero);
}

TEST(Cayley, UndampedStepIsTimeReversible) {
  for (const auto bc : {BoundaryCondition::DDD, BoundaryCondition::DNN}) {
    const auto sys = assemble(mixed_params(), centre_damping(0.0), bc, 18);
    const VectorXd U = make_initial(sys, RandomSmoothInit{4, 0.5});
    const double dt = 0.02;
    const VectorXd forward = CayleyStepper(sys, dt).step(U);
    // One step with -dt: (I + dt/2 A)^{-1}(I - dt/2 A).
    const MatrixXd id = MatrixXd::Identity(sys.dim(), sys.dim());
    const VectorXd returned =
        (id + 0.5 * dt * sys.A).partialPivLu().solve((id - 0.5 * dt * sys.A) * forward);
    EXPECT_LE((returned - U).norm(), 1e-11 * U.norm()) << to_string(bc);
  }
}

TEST(Cayley, RejectsBadStep) {
  const auto sys = assemble(BeamParameters{}, centre_damping(), BoundaryCondition::DDD, 8);
  EXPECT_THROW(CayleyStepper(sys, 0.0), InvalidInput);
  EXPECT_THROW(CayleyStepper(sys, -1.0), InvalidInput);
}

TEST(TimeStep, DefaultIsHalfCellCrossing) {
  const auto sys = assemble(mixed_params(), centre_damping(), BoundaryCondition::DDD, 40);
  EXPECT_DOUBLE_EQ(default_time_step(sys), sys.grid.h / (2.0 * max_wave_speed(mixed_params())));
}

TEST(Initial, ModalIsNormalizedAndAtRest) {
  for (const auto bc : {BoundaryCondition::DDD, BoundaryCondition::DNN}) {
    const auto sys = assemble(mixed_params(), centre_damping(), bc, 16);
    const VectorXd U = make_initial(sys, ModalInit{3});
    EXPECT_NEAR(energy(sys, U), 1.0, 1e-13);
    EXPECT_EQ(U.tail(sys.layout.displacement_dim()).norm(), 0.0);
    EXPECT_THROW(make_initial(sys, ModalInit{0}), InvalidInput);
    EXPECT_THROW(make_initial(sys, ModalInit{sys.layout.displacement_dim() + 1}), InvalidInput);
  }
}

TEST(Initial, ModesAreSortedByFrequency) {
  const auto sys = assemble(mixed_params(), centre_damping(), BoundaryCondition::DNN, 16);
  const UndampedModes modes = undamped_modes(sys);
  for (int k = 1; k < modes.frequencies.size(); ++k) {
    EXPECT_LE(modes.frequencies(k - 1), modes.frequencies(k));
  }
  const MatrixXd gram = modes.shapes.transpose() * sys.mass * modes.shapes;
  EXPECT_LE((gram - MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Initial, RandomSmoothIsSeededAndNormalized) {
  const auto sys = assemble(mixed_params(), centre_damping(), BoundaryCondition::DNN, 30);
  const VectorXd a = make_initial(sys, RandomSmoothInit{42, 0.1});
  const VectorXd b = make_initial(sys, RandomSmoothInit{42, 0.1});
  const VectorXd c = make_initial(sys, RandomSmoothInit{43, 0.1});
  EXPECT_EQ(a, b);
  EXPECT_GT((a - c).norm(), 1e-3);
  EXPECT_NEAR(energy(sys, a), 1.0, 1e-13);
  const Fields f = unpack(sys, a);
  EXPECT_NEAR(f.psi.mean(), 0.0, 1e-14);
  EXPECT_NEAR(f.omega.mean(), 0.0, 1e-14);
  EXPECT_THROW(make_initial(sys, RandomSmoothInit{1, 0.0}), InvalidInput);
}

TEST(Initial, RandomSmoothStaysInLowModes) {
  const auto sys = assemble(mixed_params(), centre_damping(), BoundaryCondition::DDD, 30);
  const VectorXd U = make_initial(sys, RandomSmoothInit{5, 0.1});
  const UndampedModes modes = undamped_modes(sys);
  const int m = sys.layout.displacement_dim();
  const int kept = static_cast<int>(std::floor(0.1 * m));
  const VectorXd coeff = modes.shapes.transpose() * sys.mass * U.head(m);
  EXPECT_LE(coeff.tail(m - kept).norm(), 1e-10 * coeff.norm());
}

TEST(Initial, CustomChecksDimension) {
  const auto sys = assemble(BeamParameters{}, centre_damping(), BoundaryCondition::DDD, 8);
  EXPECT_THROW(make_initial(sys, CustomInit{VectorXd::Ones(3)}), InvalidInput);
  EXPECT_THROW(make_initial(sys, CustomInit{VectorXd::Zero(sys.dim())}), InvalidInput);
  const VectorXd U = VectorXd::Ones(sys.dim());
  EXPECT_EQ(make_initial(sys, CustomInit{U}), U);
}

TEST(Simulate, UndampedEnergyIsConserved) {
  for (const auto bc : {BoundaryCondition::DDD, BoundaryCondition::DNN}) {
    const auto sys = assemble(mixed_params(), centre_damping(0.0), bc, 24);
    const VectorXd U0 = make_initial(sys, RandomSmoothInit{9, 0.2});
    const double dt = default_time_step(sys);
    const auto res = simulate(sys, U0, dt, 2000 * dt, 100);
    EXPECT_EQ(res.steps, 2000);
    EXPECT_LE(std::abs(res.series.energy.back() - 1.0), 1e-11);
    for (const double d : res.series.dissipation) EXPECT_EQ(d, 0.0);
  }
}

TEST(Simulate, DampedEnergyDecreasesAndBalances) {
  for (const auto bc : {BoundaryCondition::DDD, BoundaryCondition::DNN}) {
    const auto sys = assemble(mixed_params(), centre_damping(2.0), bc, 24);
    const VectorXd U0 = make_initial(sys, RandomSmoothInit{2, 0.2});
    const auto res = simulate(sys, U0, 0.01, 5.0, 1);
    for (std::size_t i = 1; i < res.series.size(); ++i) {
      EXPECT_LE(res.series.energy[i], res.series.energy[i - 1] + 1e-14);
    }
    EXPECT_LT(res.series.energy.back(), 0.9);
    EXPECT_LE(res.balance.max_midpoint_residual, 1e-13);
    EXPECT_LE(res.balance.max_trapezoid_residual, 1e-3);
  }
}

TEST(Simulate, TrapezoidResidualIsSecondOrderOverFixedHorizon) {
  const auto sys = assemble(mixed_params(), centre_damping(), BoundaryCondition::DDD, 30);
  const VectorXd U0 = make_initial(sys, ModalInit{1});
  const auto coarse = simulate(sys, U0, 0.02, 1.0, 1);
  const auto fine = simulate(sys, U0, 0.01, 1.0, 1);
  const double ratio =
      coarse.balance.accumulated_trapezoid_residual / fine.balance.accumulated_trapezoid_residual;
  EXPECT_NEAR(ratio, 4.0, 0.5);
}

TEST(Simulate, SamplingStrideAndFinalSample) {
  const auto sys = assemble(BeamParameters{}, centre_damping(), BoundaryCondition::DDD, 8);
  const VectorXd U0 = make_initial(sys, ModalInit{1});
  const auto res = simulate(sys, U0, 0.1, 1.05, 3, "abc");
  EXPECT_EQ(res.steps, 11);
  ASSERT_EQ(res.series.size(), 5u);  // t = 0, 0.3, 0.6, 0.9, 1.1
  EXPECT_DOUBLE_EQ(res.series.times.back(), 11 * 0.1);
  EXPECT_EQ(res.series.config_id, "abc");
  EXPECT_THROW(simulate(sys, U0, 0.1, 1.0, 0), InvalidInput);
  EXPECT_THROW(simulate(sys, U0, 0.1, -1.0, 1), InvalidInput);
}

TEST(Simulate, NonFiniteInputAndOverflow) {
  const auto sys = assemble(BeamParameters{}, centre_damping(), BoundaryCondition::DDD, 8);
  VectorXd U0 = make_initial(sys, ModalInit{1});
  VectorXd bad = U0;
  bad(0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(simulate(sys, bad, 0.1, 1.0, 1), InvalidInput);
  EXPECT_THROW(simulate(sys, U0 * 1e300, 0.1, 1.0, 1), NumericalFailure);
}
