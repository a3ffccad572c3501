#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "fracell/grid.hpp"

namespace fracell {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Flux-form finite-difference discretization of -div(A grad u).
///
/// The matrix acts on active nodes only: interior nodes for Dirichlet faces
/// (eliminated), all nodes along Neumann axes (zero-flux faces). Entries are
/// pointwise, i.e. (M u)_i approximates L u at node i; the discrete L2 pairing
/// carries the cell volume separately.
class DiscreteOperator {
 public:
  DiscreteOperator(Grid grid, BoundaryCondition bc, CoefficientField coeff, SparseMatrix matrix,
                   std::vector<int> active);

  const Grid& grid() const { return grid_; }
  const BoundaryCondition& bc() const { return bc_; }
  const CoefficientField& coefficients() const { return coeff_; }
  const SparseMatrix& matrix() const { return matrix_; }
  /// Grid flat index of each active unknown.
  const std::vector<int>& active() const { return active_; }
  int size() const { return static_cast<int>(active_.size()); }
  double weight() const { return grid_.cell_volume(); }
  bool has_kernel() const { return !bc_.any_dirichlet(grid_.dim()); }

  /// Active-node values of a grid function.
  Eigen::VectorXd restrict(const GridFunction& u) const;
  /// Grid function with the given active values and zeros elsewhere.
  GridFunction extend(const Eigen::VectorXd& active_values) const;
  /// Active index of a grid node, or -1.
  int active_index(int flat) const { return grid_to_active_.at(flat); }

 private:
  Grid grid_;
  BoundaryCondition bc_;
  CoefficientField coeff_;
  SparseMatrix matrix_;
  std::vector<int> active_;
  std::vector<int> grid_to_active_;
};

DiscreteOperator assemble(const Grid& grid, const CoefficientField& coeff, const BoundaryCondition& bc);

/// Matrix-vector product on a grid function; boundary nodes of Dirichlet
/// faces are returned as zero.
GridFunction apply(const DiscreteOperator& op, const GridFunction& u);

struct EllipticityReport {
  double lambda1_observed = 0.0;
  double lambda2_observed = 0.0;
  bool pass = false;
};

/// Min/max Rayleigh quotient of A over nodal and face samples and a direction set.
EllipticityReport ellipticity_check(const CoefficientField& coeff, const Grid& grid);

/// Discrete Gagliardo seminorm squared,
/// sum_{x != z} (u(x) - u(z))^2 / |x - z|^{n + 2s} dV^2, over all grid nodes.
double hs_seminorm(const GridFunction& u, double s);

namespace serial {
double hs_seminorm(const GridFunction& u, double s);
}

/// Discrete L2 inner product with the uniform cell volume.
double inner(const GridFunction& u, const GridFunction& v);
double l2_norm(const GridFunction& u);

}  // namespace fracell
