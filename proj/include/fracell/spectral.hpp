#pragma once

#include <functional>

#include <Eigen/Core>

#include "fracell/operator.hpp"

namespace fracell {

/// Full eigendecomposition of a discrete operator.
///
/// Eigenvalues ascend; eigenvectors are stored as columns over the active
/// nodes and are orthonormal in the discrete L2 product (cell volume weight),
/// so that sum_k phi_k(x) phi_k(z) is the density of the identity.
class EigenBasis {
 public:
  EigenBasis(DiscreteOperator op, Eigen::VectorXd eigenvalues, Eigen::MatrixXd vectors);

  const DiscreteOperator& op() const { return op_; }
  const Grid& grid() const { return op_.grid(); }
  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }
  int count() const { return static_cast<int>(values_.size()); }
  double weight() const { return op_.weight(); }
  double lambda_min() const { return values_[0]; }
  double lambda_max() const { return values_[count() - 1]; }
  /// Smallest strictly positive eigenvalue (skips the Neumann zero mode).
  double lambda_min_positive() const;
  bool neumann_kernel() const { return op_.has_kernel(); }

  /// u_k = <u, phi_k> in discrete L2.
  Eigen::VectorXd coefficients(const GridFunction& u) const;
  GridFunction synthesize(const Eigen::VectorXd& coeffs) const;
  GridFunction eigenfunction(int k) const;
  /// sum_k g(lambda_k) u_k phi_k.
  GridFunction apply_multiplier(const GridFunction& u, const std::function<double(double)>& g) const;

  /// max_k |M phi_k - lambda_k phi_k|_2 / lambda_max (Euclidean norm of the unit-normalized vector).
  double max_residual() const;
  /// max_{j,k} |<phi_j, phi_k> - delta_jk|.
  double orthonormality_error() const;

 private:
  DiscreteOperator op_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd vectors_;
};

EigenBasis eigendecompose(const DiscreteOperator& op);

/// L^s u = sum lambda_k^s u_k phi_k for s in (0, 1]; the Neumann zero mode drops out.
GridFunction fractional_apply(const EigenBasis& basis, const GridFunction& u, double s);

/// L^{-s} f. Neumann data must have zero mean (relative to ||f||) and the
/// returned solution has zero mean.
GridFunction fractional_solve(const EigenBasis& basis, const GridFunction& f, double s);

/// sum lambda_k^s u_k^2, the squared H^s energy.
double hs_energy(const EigenBasis& basis, const GridFunction& u, double s);
/// Square root of hs_energy.
double hs_energy_norm(const EigenBasis& basis, const GridFunction& u, double s);

/// Neumann mean removal with the uniform discrete measure.
GridFunction remove_mean(const GridFunction& u);
double mean(const GridFunction& u);

struct ScalingReport {
  double factor = 1.0;
  double max_relative_deviation = 0.0;
  int nodes_compared = 0;
};

/// Compares L_scaled^s u_scaled with factor^{2s} (L^s u)(factor x), where the
/// scaled grid maps onto the original grid node-for-node under x -> factor x
/// and u_scaled(x) = u(factor x).
ScalingReport scaling_check(const EigenBasis& scaled, const EigenBasis& original, const GridFunction& u, double s,
                            double factor);

}  // namespace fracell
