#include "bresse/discretize.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "bresse/errors.hpp"

namespace bresse {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Second-order form in full nodal coordinates q = (phi[1..n-1], psi[cells], omega[cells]).
struct NodalForms {
  SpMat stiffness;
  VectorXd mass;     // diagonal
  VectorXd damping;  // diagonal
};

// Strain samples and quadrature weights for one energy term.
struct StrainTerm {
  SpMat op;
  VectorXd weights;
  double coefficient;
};

void check_inputs(const BeamParameters& params, BoundaryCondition bc, int n) {
  validate(params);
  if (n < kMinCells) {
    std::ostringstream msg;
    msg << "grid needs at least " << kMinCells << " cells (got n=" << n << ")";
    throw InvalidInput(msg.str());
  }
  if (bc == BoundaryCondition::DNN) {
    const auto adm = check_dnn_admissible(params);
    if (!adm.ok) {
      std::ostringstream msg;
      msg << "DNN energy norm degenerates: L must differ from n*pi/l, but L=" << params.L
          << " is within " << adm.distance << " of " << adm.nearest_n << "*pi/l";
      throw InvalidInput(msg.str());
    }
  }
}

std::vector<StrainTerm> strain_terms(const BeamParameters& p, BoundaryCondition bc,
                                     const Grid& g) {
  const int n = g.n;
  const double h = g.h;
  const int cols = 3 * n - 1;
  const int psi0 = n - 1;
  const int om0 = psi0 + n;
  auto phi_col = [](int node) { return node - 1; };  // interior nodes only

  // phi_x + psi + l*omega at cell centres.
  std::vector<Triplet> t1;
  for (int i = 0; i < n; ++i) {
    if (i + 1 <= n - 1) t1.emplace_back(i, phi_col(i + 1), 1.0 / h);
    if (i >= 1) t1.emplace_back(i, phi_col(i), -1.0 / h);
    t1.emplace_back(i, psi0 + i, 1.0);
    t1.emplace_back(i, om0 + i, p.l);
  }
  SpMat s1(n, cols);
  s1.setFromTriplets(t1.begin(), t1.end());

  // psi_x and omega_x - l*phi at nodes. Dirichlet cell fields reflect
  // oddly through the boundary; Neumann ones evenly, which makes the
  // boundary-node derivative vanish, so DNN keeps interior nodes only.
  const bool dirichlet = bc == BoundaryCondition::DDD;
  const int first = dirichlet ? 0 : 1;
  const int last = dirichlet ? n : n - 1;
  const int rows = last - first + 1;
  std::vector<Triplet> t2, t3;
  VectorXd wn(rows);
  for (int j = first; j <= last; ++j) {
    const int r = j - first;
    wn(r) = (j == 0 || j == n) ? 0.5 * h : h;
    auto add_diff = [&](std::vector<Triplet>& t, int base) {
      if (j == 0) {
        t.emplace_back(r, base + 0, 2.0 / h);
      } else if (j == n) {
        t.emplace_back(r, base + n - 1, -2.0 / h);
      } else {
        t.emplace_back(r, base + j, 1.0 / h);
        t.emplace_back(r, base + j - 1, -1.0 / h);
      }
    };
    add_diff(t2, psi0);
    add_diff(t3, om0);
    if (j >= 1 && j <= n - 1) t3.emplace_back(r, phi_col(j), -p.l);
  }
  SpMat s2(rows, cols), s3(rows, cols);
  s2.setFromTriplets(t2.begin(), t2.end());
  s3.setFromTriplets(t3.begin(), t3.end());

  return {{std::move(s1), VectorXd::Constant(n, h), p.kappa},
          {std::move(s2), wn, p.b},
          {std::move(s3), wn, p.kappa0}};
}

NodalForms nodal_forms(const BeamParameters& p, const DampingProfile* profile,
                       BoundaryCondition bc, const Grid& g) {
  const int n = g.n;
  const int cols = 3 * n - 1;
  NodalForms out;
  out.stiffness.resize(cols, cols);
  for (const auto& term : strain_terms(p, bc, g)) {
    SpMat weighted = term.op.transpose() * (term.coefficient * term.weights).asDiagonal();
    out.stiffness += weighted * term.op;
  }
  out.mass.resize(cols);
  out.mass.head(n - 1).setConstant(p.rho1 * g.h);
  out.mass.segment(n - 1, n).setConstant(p.rho2 * g.h);
  out.mass.tail(n).setConstant(p.rho1 * g.h);
  out.damping = VectorXd::Zero(cols);
  if (profile != nullptr) {
    for (int i = 0; i < n; ++i) {
      out.damping(n - 1 + i) = g.h * damping_at(*profile, g.cell_center(i), g.L);
    }
  }
  return out;
}

// Embedding of stored displacement coordinates into nodal coordinates.
MatrixXd embedding(BoundaryCondition bc, const Grid& g) {
  const int n = g.n;
  if (bc == BoundaryCondition::DDD) return MatrixXd::Identity(3 * n - 1, 3 * n - 1);
  const MatrixXd basis = mean_zero_basis(g);
  MatrixXd q = MatrixXd::Zero(3 * n - 1, 3 * n - 3);
  q.topLeftCorner(n - 1, n - 1).setIdentity();
  q.block(n - 1, n - 1, n, n - 1) = basis;
  q.block(2 * n - 1, 2 * n - 2, n, n - 1) = basis;
  return q;
}

StateLayout layout_for(BoundaryCondition bc, const Grid& g) {
  return {g.n - 1, bc == BoundaryCondition::DNN ? g.n - 1 : g.n};
}

MatrixXd block_diag(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out = MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace

Grid::Grid(int cells, double length) : n(cells), L(length), h(length / cells) {}

MatrixXd mean_zero_basis(const Grid& grid) {
  const int n = grid.n;
  // Householder reflector sending the normalized constant vector to e_0; its
  // remaining columns span the orthogonal complement.
  VectorXd v = VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  v(0) += 1.0;
  v.normalize();
  MatrixXd reflector = MatrixXd::Identity(n, n) - 2.0 * v * v.transpose();
  return reflector.rightCols(n - 1) / std::sqrt(grid.h);
}

MatrixXd mean_zero_projector(const Grid& grid) {
  const MatrixXd basis = mean_zero_basis(grid);
  return basis * basis.transpose() * grid.h;
}

MatrixXd assemble_energy_gram(const BeamParameters& params, BoundaryCondition bc,
                              const Grid& grid) {
  check_inputs(params, bc, grid.n);
  const NodalForms forms = nodal_forms(params, nullptr, bc, grid);
  const MatrixXd q = embedding(bc, grid);
  const MatrixXd k = q.transpose() * (forms.stiffness * q);
  const MatrixXd m = q.transpose() * forms.mass.asDiagonal() * q;
  return block_diag(k, m);
}

DiscreteSystem assemble(const BeamParameters& params, const DampingProfile& profile,
                        BoundaryCondition bc, int n) {
  check_inputs(params, bc, n);
  validate(profile, params.L);

  DiscreteSystem sys;
  sys.params = params;
  sys.profile = profile;
  sys.bc = bc;
  sys.grid = Grid(n, params.L);
  sys.layout = layout_for(bc, sys.grid);

  const NodalForms forms = nodal_forms(params, &profile, bc, sys.grid);
  const MatrixXd q = embedding(bc, sys.grid);
  sys.stiffness = q.transpose() * (forms.stiffness * q);
  sys.mass = q.transpose() * forms.mass.asDiagonal() * q;
  sys.damping = q.transpose() * forms.damping.asDiagonal() * q;
  sys.cell_basis = q.block(n - 1, n - 1, n, sys.layout.cell);

  sys.damping_samples.resize(n);
  for (int i = 0; i < n; ++i) {
    sys.damping_samples(i) = damping_at(profile, sys.grid.cell_center(i), params.L);
  }

  const int m = sys.layout.displacement_dim();
  const int d = sys.layout.dim();
  const Eigen::LLT<MatrixXd> mass_llt(sys.mass);
  if (mass_llt.info() != Eigen::Success) throw NumericalFailure("mass matrix is not SPD");

  sys.A = MatrixXd::Zero(d, d);
  sys.A.topRightCorner(m, m).setIdentity();
  sys.A.bottomLeftCorner(m, m) = -mass_llt.solve(sys.stiffness);
  sys.A.bottomRightCorner(m, m) = -mass_llt.solve(sys.damping);

  sys.M = block_diag(sys.stiffness, sys.mass);
  sys.M_sparse = sys.M.sparseView();
  MatrixXd dform = MatrixXd::Zero(d, d);
  dform.bottomRightCorner(m, m) = sys.damping;
  sys.damping_form = dform.sparseView();
  return sys;
}

Fields unpack(const DiscreteSystem& sys, const VectorXd& U) {
  const auto& lay = sys.layout;
  const int n = sys.grid.n;
  Fields f;
  auto nodal = [&](int offset) {
    VectorXd out = VectorXd::Zero(n + 1);
    out.segment(1, n - 1) = U.segment(offset, lay.phi);
    return out;
  };
  auto cells = [&](int offset) -> VectorXd {
    return sys.cell_basis * U.segment(offset, lay.cell);
  };
  f.phi = nodal(lay.phi_offset());
  f.u = nodal(lay.u_offset());
  f.psi = cells(lay.psi_offset());
  f.omega = cells(lay.omega_offset());
  f.v = cells(lay.v_offset());
  f.z = cells(lay.z_offset());
  return f;
}

VectorXd pack(const DiscreteSystem& sys, const Fields& f) {
  const auto& lay = sys.layout;
  const int n = sys.grid.n;
  VectorXd U(lay.dim());
  // Stored coordinates are the quadrature inner products with the basis
  // columns; for DDD the basis is the identity and h-scaling is skipped.
  auto cells = [&](const VectorXd& values) -> VectorXd {
    if (sys.bc == BoundaryCondition::DDD) return values;
    return sys.cell_basis.transpose() * values * sys.grid.h;
  };
  U.segment(lay.phi_offset(), lay.phi) = f.phi.segment(1, n - 1);
  U.segment(lay.u_offset(), lay.phi) = f.u.segment(1, n - 1);
  U.segment(lay.psi_offset(), lay.cell) = cells(f.psi);
  U.segment(lay.omega_offset(), lay.cell) = cells(f.omega);
  U.segment(lay.v_offset(), lay.cell) = cells(f.v);
  U.segment(lay.z_offset(), lay.cell) = cells(f.z);
  return U;
}

double energy(const DiscreteSystem& sys, const VectorXd& U) {
  return 0.5 * U.dot(sys.M_sparse * U);
}

double dissipation_rate(const DiscreteSystem& sys, const VectorXd& U) {
  return U.dot(sys.damping_form * U);
}

}  // namespace bresse
