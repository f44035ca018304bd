#include "bresse/evolve.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "bresse/errors.hpp"

namespace bresse {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

constexpr double kSparseFillLimit = 0.05;

SpMat sparse_identity(int d) {
  SpMat id(d, d);
  id.setIdentity();
  return id;
}

}  // namespace

CayleyStepper::CayleyStepper(const DiscreteSystem& sys, double dt) : dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidInput("time step must be finite and > 0");
  }
  const int d = sys.dim();
  const SpMat a = sys.A.sparseView();
  const double fill = static_cast<double>(a.nonZeros()) / (static_cast<double>(d) * d);

  if (fill <= kSparseFillLimit) {
    const SpMat id = sparse_identity(d);
    forward_ = id + 0.5 * dt * a;
    SpMat backward = id - 0.5 * dt * a;
    backward.makeCompressed();
    lu_ = std::make_shared<Eigen::SparseLU<SpMat>>();
    lu_->compute(backward);
    if (lu_->info() != Eigen::Success) {
      throw NumericalFailure("internal error: implicit midpoint matrix is singular (dt=" +
                             std::to_string(dt) + ")");
    }
    return;
  }

  const MatrixXd id = MatrixXd::Identity(d, d);
  const Eigen::PartialPivLU<MatrixXd> lu(id - 0.5 * dt * sys.A);
  if (!(lu.rcond() > 1e-14)) {
    throw NumericalFailure("internal error: implicit midpoint matrix is singular (dt=" +
                           std::to_string(dt) + ")");
  }
  propagator_ = lu.solve(id + 0.5 * dt * sys.A);
}

VectorXd CayleyStepper::step(const VectorXd& U) const {
  if (lu_) return lu_->solve(forward_ * U);
  return propagator_ * U;
}

VectorXd step(const DiscreteSystem& sys, const VectorXd& U, double dt) {
  return CayleyStepper(sys, dt).step(U);
}

double default_time_step(const DiscreteSystem& sys) {
  return sys.grid.h / (2.0 * max_wave_speed(sys.params));
}

UndampedModes undamped_modes(const DiscreteSystem& sys) {
  const Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> solver(sys.stiffness, sys.mass);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("undamped modal decomposition failed");
  }
  UndampedModes modes;
  modes.frequencies = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  modes.shapes = solver.eigenvectors();
  return modes;
}

namespace {

VectorXd normalized(const DiscreteSystem& sys, VectorXd U) {
  const double e = energy(sys, U);
  if (!(e > 0.0)) throw InvalidInput("initial state has zero energy");
  return U / std::sqrt(e);
}

struct InitialBuilder {
  const DiscreteSystem& sys;

  VectorXd operator()(const ModalInit& spec) const {
    const UndampedModes modes = undamped_modes(sys);
    const int count = static_cast<int>(modes.frequencies.size());
    if (spec.index < 1 || spec.index > count) {
      std::ostringstream msg;
      msg << "modal index " << spec.index << " out of range [1, " << count << "]";
      throw InvalidInput(msg.str());
    }
    const int m = sys.layout.displacement_dim();
    VectorXd U = VectorXd::Zero(sys.dim());
    U.head(m) = modes.shapes.col(spec.index - 1);
    return normalized(sys, std::move(U));
  }

  VectorXd operator()(const RandomSmoothInit& spec) const {
    if (!(spec.cutoff > 0.0 && spec.cutoff <= 1.0)) {
      throw InvalidInput("spectral cutoff must lie in (0, 1]");
    }
    const UndampedModes modes = undamped_modes(sys);
    const int count = static_cast<int>(modes.frequencies.size());
    const int kept = std::max(1, static_cast<int>(std::floor(spec.cutoff * count)));
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal;
    VectorXd displacement_coeff(kept), velocity_coeff(kept);
    for (int k = 0; k < kept; ++k) {
      displacement_coeff(k) = normal(rng);
      velocity_coeff(k) = normal(rng) * modes.frequencies(k);
    }
    const int m = sys.layout.displacement_dim();
    VectorXd U(sys.dim());
    U.head(m) = modes.shapes.leftCols(kept) * displacement_coeff;
    U.tail(m) = modes.shapes.leftCols(kept) * velocity_coeff;
    return normalized(sys, std::move(U));
  }

  VectorXd operator()(const CustomInit& spec) const {
    if (spec.state.size() != sys.dim()) {
      std::ostringstream msg;
      msg << "custom initial state has size " << spec.state.size() << ", expected "
          << sys.dim();
      throw InvalidInput(msg.str());
    }
    if (!(energy(sys, spec.state) > 0.0)) throw InvalidInput("initial state has zero energy");
    return spec.state;
  }
};

}  // namespace

VectorXd make_initial(const DiscreteSystem& sys, const InitialData& spec) {
  return std::visit(InitialBuilder{sys}, spec);
}

SimulationResult simulate(const DiscreteSystem& sys, const VectorXd& U0, double dt, double T,
                          int sample_stride, std::string config_id) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidInput("final time T must be > 0");
  if (sample_stride < 1) throw InvalidInput("sample_stride must be >= 1");
  if (U0.size() != sys.dim()) throw InvalidInput("initial state has the wrong dimension");
  if (!U0.allFinite()) throw InvalidInput("initial state has non-finite entries");

  const CayleyStepper stepper(sys, dt);
  const long steps = static_cast<long>(std::ceil(T / dt - 1e-9));

  SimulationResult out;
  out.dt = dt;
  out.steps = steps;
  out.series.config_id = std::move(config_id);

  VectorXd U = U0;
  double e = energy(sys, U);
  double d = dissipation_rate(sys, U);
  const double e0 = e;
  if (!(e0 > 0.0)) throw InvalidInput("initial state has zero energy");
  if (!std::isfinite(e0)) throw NumericalFailure("initial energy is not finite");

  auto record = [&](double t) {
    out.series.times.push_back(t);
    out.series.energy.push_back(e);
    out.series.dissipation.push_back(d);
  };
  record(0.0);

  for (long k = 0; k < steps; ++k) {
    VectorXd next = stepper.step(U);
    if (!next.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite state at step " << k + 1 << " (dt=" << dt << ")";
      throw NumericalFailure(msg.str());
    }
    const double e_next = energy(sys, next);
    const double d_next = dissipation_rate(sys, next);
    if (!std::isfinite(e_next)) {
      std::ostringstream msg;
      msg << "non-finite energy at step " << k + 1 << " (dt=" << dt << ")";
      throw NumericalFailure(msg.str());
    }
    const double d_mid = dissipation_rate(sys, 0.5 * (U + next));

    if (e_next > e + kMonotonicityTol * e0) {
      std::ostringstream msg;
      msg << "energy increased at step " << k + 1 << " (dt=" << dt << "): " << e << " -> "
          << e_next;
      throw NumericalFailure(msg.str());
    }
    const double mid_res = std::abs(e_next - e + dt * d_mid) / e0;
    const double trap_res = std::abs(e_next - e + 0.5 * dt * (d + d_next)) / e0;
    auto& bal = out.balance;
    bal.max_midpoint_residual = std::max(bal.max_midpoint_residual, mid_res);
    bal.max_trapezoid_residual = std::max(bal.max_trapezoid_residual, trap_res);
    bal.accumulated_trapezoid_residual += trap_res;

    U = std::move(next);
    e = e_next;
    d = d_next;
    if ((k + 1) % sample_stride == 0 || k + 1 == steps) record((k + 1) * dt);
  }
  out.final_state = std::move(U);
  return out;
}

}  // namespace bresse
