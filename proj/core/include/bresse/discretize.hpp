#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bresse/model.hpp"

namespace bresse {

/// Uniform grid with n cells on [0, L]. Vertical displacement phi and its
/// velocity u live on the interior nodes x_j = j*h; shear angle psi,
/// longitudinal displacement omega and their velocities v, z live on the
/// cell centres (i + 1/2)*h.
struct Grid {
  int n = 0;
  double L = 0.0;
  double h = 0.0;

  Grid() = default;
  Grid(int cells, double length);

  double node(int j) const { return j * h; }
  double cell_center(int i) const { return (i + 0.5) * h; }
};

/// Sizes of the blocks of a state vector U = (phi, psi, omega, u, v, z).
/// For DNN the cell fields are stored in coordinates of the mean-zero basis,
/// so `cell` is n - 1 rather than n.
struct StateLayout {
  int phi = 0;
  int cell = 0;

  int displacement_dim() const { return phi + 2 * cell; }
  int dim() const { return 2 * displacement_dim(); }

  int phi_offset() const { return 0; }
  int psi_offset() const { return phi; }
  int omega_offset() const { return phi + cell; }
  int u_offset() const { return displacement_dim(); }
  int v_offset() const { return displacement_dim() + phi; }
  int z_offset() const { return displacement_dim() + phi + cell; }
};

/// Finite-dimensional generator U' = A U together with its energy Gram
/// matrix (E = U^T M U / 2). M A + A^T M = -2 * damping_form.
struct DiscreteSystem {
  BeamParameters params;
  DampingProfile profile;
  BoundaryCondition bc = BoundaryCondition::DDD;
  Grid grid;
  StateLayout layout;

  Eigen::MatrixXd A;
  Eigen::MatrixXd M;

  // Second-order form: mass q'' + damping q' + stiffness q = 0.
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
  Eigen::MatrixXd damping;

  Eigen::SparseMatrix<double> M_sparse;
  Eigen::SparseMatrix<double> damping_form;  ///< d x d, nonzero on the (v, v) block only

  Eigen::VectorXd damping_samples;  ///< a(x) at the n cell centres
  Eigen::MatrixXd cell_basis;       ///< n x layout.cell, maps stored cell coordinates to cell values

  int dim() const { return layout.dim(); }
};

inline constexpr int kMinCells = 4;

/// Throws InvalidInput for n < kMinCells, invalid parameters, or a DNN
/// configuration with L = n*pi/l.
DiscreteSystem assemble(const BeamParameters& params, const DampingProfile& profile,
                        BoundaryCondition bc, int n);

/// Energy Gram matrix alone (same coordinates as assemble()).
Eigen::MatrixXd assemble_energy_gram(const BeamParameters& params, BoundaryCondition bc,
                                     const Grid& grid);

/// Orthonormal basis (midpoint-quadrature inner product) of the cell
/// functions with zero quadrature mean. Returns an n x (n - 1) matrix.
Eigen::MatrixXd mean_zero_basis(const Grid& grid);

/// Quadrature-orthogonal projector onto the mean-zero cell functions.
Eigen::MatrixXd mean_zero_projector(const Grid& grid);

/// Nodal / cell values of the six fields. phi and u include the two
/// (zero) boundary nodes, so they have n + 1 entries; the rest have n.
struct Fields {
  Eigen::VectorXd phi, psi, omega, u, v, z;
};

Fields unpack(const DiscreteSystem& sys, const Eigen::VectorXd& U);

/// Inverse of unpack(). For DNN the cell fields are projected onto the
/// mean-zero subspace first; boundary entries of phi and u are ignored.
Eigen::VectorXd pack(const DiscreteSystem& sys, const Fields& f);

double energy(const DiscreteSystem& sys, const Eigen::VectorXd& U);

/// Sum over cells of h * a(x_i) * |v_i|^2, i.e. -dE/dt for the semi-discrete flow.
double dissipation_rate(const DiscreteSystem& sys, const Eigen::VectorXd& U);

}  // namespace bresse
