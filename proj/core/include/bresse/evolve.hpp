#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "bresse/discretize.hpp"

namespace bresse {

/// Implicit midpoint (Cayley) map U -> (I - dt/2 A)^{-1} (I + dt/2 A) U.
/// The factorization is computed once at construction. Sparse generators
/// (DDD) use a sparse LU; dense ones (DNN, mean-zero reduced) precompute
/// the propagator matrix.
class CayleyStepper {
 public:
  CayleyStepper(const DiscreteSystem& sys, double dt);

  Eigen::VectorXd step(const Eigen::VectorXd& U) const;

  double dt() const { return dt_; }
  bool uses_sparse_solver() const { return lu_ != nullptr; }

 private:
  double dt_;
  Eigen::MatrixXd propagator_;
  Eigen::SparseMatrix<double> forward_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

/// One implicit-midpoint step; factorizes on every call, prefer CayleyStepper
/// inside loops.
Eigen::VectorXd step(const DiscreteSystem& sys, const Eigen::VectorXd& U, double dt);

/// h / (2 c_max).
double default_time_step(const DiscreteSystem& sys);

/// Undamped normal modes: stiffness q = w^2 mass q, ascending w.
struct UndampedModes {
  Eigen::VectorXd frequencies;
  Eigen::MatrixXd shapes;  ///< columns are displacement vectors, mass-orthonormal
};

UndampedModes undamped_modes(const DiscreteSystem& sys);

struct ModalInit {
  int index = 1;  ///< 1-based, sorted by frequency
};

/// Random combination of the lowest `cutoff` fraction of undamped modes.
struct RandomSmoothInit {
  std::uint64_t seed = 0;
  double cutoff = 0.1;
};

struct CustomInit {
  Eigen::VectorXd state;
};

using InitialData = std::variant<ModalInit, RandomSmoothInit, CustomInit>;

/// Modal and RandomSmooth states are normalized to unit energy. Custom
/// states are returned unchanged but must have positive energy.
Eigen::VectorXd make_initial(const DiscreteSystem& sys, const InitialData& spec);

struct EnergyTimeSeries {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> dissipation;
  std::string config_id;

  std::size_t size() const { return times.size(); }
};

/// Per-step energy balance, normalized by E(0). The midpoint residual uses
/// the dissipation of the midpoint state, for which the scheme satisfies the
/// balance exactly; the trapezoid residual uses the endpoint average and is
/// O(dt^3) per step.
struct EnergyBalance {
  double max_midpoint_residual = 0.0;
  double max_trapezoid_residual = 0.0;
  double accumulated_trapezoid_residual = 0.0;
};

struct SimulationResult {
  EnergyTimeSeries series;
  EnergyBalance balance;
  Eigen::VectorXd final_state;
  long steps = 0;
  double dt = 0.0;
};

inline constexpr double kMonotonicityTol = 1e-12;

/// Throws NumericalFailure on non-finite states or when the energy grows by
/// more than kMonotonicityTol * E(0) in a single step.
SimulationResult simulate(const DiscreteSystem& sys, const Eigen::VectorXd& U0, double dt,
                          double T, int sample_stride, std::string config_id = {});

}  // namespace bresse
