#include "fracell/spectral.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace fracell {

EigenBasis::EigenBasis(DiscreteOperator op, Eigen::VectorXd eigenvalues, Eigen::MatrixXd vectors)
    : op_(std::move(op)), values_(std::move(eigenvalues)), vectors_(std::move(vectors)) {}

double EigenBasis::lambda_min_positive() const {
  const double floor = 1e-12 * lambda_max();
  for (int k = 0; k < count(); ++k)
    if (values_[k] > floor) return values_[k];
  throw Error("eigenbasis: no positive eigenvalue");
}

Eigen::VectorXd EigenBasis::coefficients(const GridFunction& u) const {
  return weight() * (vectors_.transpose() * op_.restrict(u));
}

GridFunction EigenBasis::synthesize(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != count()) throw Error("synthesize: coefficient count mismatch");
  return op_.extend(vectors_ * coeffs);
}

GridFunction EigenBasis::eigenfunction(int k) const { return op_.extend(vectors_.col(k)); }

GridFunction EigenBasis::apply_multiplier(const GridFunction& u, const std::function<double(double)>& g) const {
  Eigen::VectorXd c = coefficients(u);
  for (int k = 0; k < count(); ++k) c[k] *= g(values_[k]);
  return synthesize(c);
}

double EigenBasis::max_residual() const {
  const SparseMatrix& m = op_.matrix();
  double worst = 0.0;
  for (int k = 0; k < count(); ++k) {
    Eigen::VectorXd v = vectors_.col(k).normalized();
    Eigen::VectorXd r = m * v - values_[k] * v;
    worst = std::max(worst, r.norm());
  }
  return worst / std::max(lambda_max(), 1e-300);
}

double EigenBasis::orthonormality_error() const {
  Eigen::MatrixXd g = weight() * (vectors_.transpose() * vectors_);
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

EigenBasis eigendecompose(const DiscreteOperator& op) {
  Eigen::MatrixXd dense = Eigen::MatrixXd(op.matrix());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success) {
    throw Error("eigendecompose: symmetric eigensolver did not converge for " + std::to_string(op.size()) +
                " unknowns");
  }
  Eigen::VectorXd values = solver.eigenvalues();
  Eigen::MatrixXd vectors = solver.eigenvectors() / std::sqrt(op.weight());
  const int n = static_cast<int>(values.size());

  if (op.has_kernel()) {
    // The zero-flux operator annihilates constants exactly; pin the zero mode.
    values[0] = 0.0;
    vectors.col(0).setConstant(1.0 / std::sqrt(op.weight() * n));
  }
  for (int k = 0; k < n; ++k) {
    // Deterministic sign: the largest-magnitude entry is positive (the ground
    // state ends up positive everywhere).
    Eigen::Index idx;
    vectors.col(k).cwiseAbs().maxCoeff(&idx);
    if (vectors(idx, k) < 0.0) vectors.col(k) *= -1.0;
  }
  EigenBasis basis(op, std::move(values), std::move(vectors));
  const double res = basis.max_residual();
  if (!(res <= 1e-8)) {
    std::ostringstream msg;
    msg << "eigendecompose: residual " << res << " exceeds 1e-8 * lambda_max";
    throw Error(msg.str());
  }
  return basis;
}

namespace {

void check_power(double s, bool allow_one, const char* who) {
  bool ok = allow_one ? (s > 0.0 && s <= 1.0) : (s > 0.0 && s < 1.0);
  if (!ok) throw Error(std::string(who) + ": s out of range");
}

}  // namespace

GridFunction fractional_apply(const EigenBasis& basis, const GridFunction& u, double s) {
  check_power(s, true, "fractional_apply");
  return basis.apply_multiplier(u, [s](double lam) { return lam > 0.0 ? std::pow(lam, s) : 0.0; });
}

double mean(const GridFunction& u) { return u.values.mean(); }

GridFunction remove_mean(const GridFunction& u) {
  GridFunction v = u;
  v.values.array() -= u.values.mean();
  return v;
}

GridFunction fractional_solve(const EigenBasis& basis, const GridFunction& f, double s) {
  check_power(s, true, "fractional_solve");
  if (basis.neumann_kernel()) {
    const double m = std::abs(mean(f));
    const double norm = f.values.norm() / std::sqrt(static_cast<double>(f.size()));
    if (m > 1e-10 * norm) throw Error("fractional_solve: Neumann datum must have zero mean (compatibility)");
  }
  return basis.apply_multiplier(f, [s](double lam) { return lam > 0.0 ? std::pow(lam, -s) : 0.0; });
}

double hs_energy(const EigenBasis& basis, const GridFunction& u, double s) {
  check_power(s, false, "hs_energy");
  Eigen::VectorXd c = basis.coefficients(u);
  double e = 0.0;
  for (int k = 0; k < basis.count(); ++k) {
    double lam = basis.eigenvalues()[k];
    if (lam > 0.0) e += std::pow(lam, s) * c[k] * c[k];
  }
  return e;
}

double hs_energy_norm(const EigenBasis& basis, const GridFunction& u, double s) {
  return std::sqrt(hs_energy(basis, u, s));
}

ScalingReport scaling_check(const EigenBasis& scaled, const EigenBasis& original, const GridFunction& u, double s,
                            double factor) {
  if (!(factor > 0.0)) throw Error("scaling_check: factor must be positive");
  const Grid& gs = scaled.grid();
  const Grid& go = original.grid();
  if (gs.dim() != go.dim()) throw Error("scaling_check: incompatible grids (dimension)");
  for (int a = 0; a < gs.dim(); ++a) {
    if (gs.nodes(a) != go.nodes(a) || std::abs(gs.extent(a) * factor - go.extent(a)) > 1e-12 * go.extent(a))
      throw Error("scaling_check: incompatible grids (node images do not match)");
  }
  if (!(scaled.op().bc() == original.op().bc())) throw Error("scaling_check: boundary conditions differ");
  if (!(u.grid == go)) throw Error("scaling_check: u must live on the original grid");
  for (int k = 0; k < gs.size(); ++k) {
    Point x = gs.point(k);
    Point y{factor * x[0], factor * x[1]};
    if ((scaled.op().coefficients().at(x) - original.op().coefficients().at(y)).norm() > 1e-12)
      throw Error("scaling_check: coefficients are not the rescaled field A(factor x)");
  }

  GridFunction u_scaled(gs, u.values);
  GridFunction lhs = fractional_apply(scaled, u_scaled, s);
  GridFunction rhs = fractional_apply(original, u, s);
  const double mult = std::pow(factor, 2.0 * s);
  double scale = 0.0, dev = 0.0;
  for (int k = 0; k < gs.size(); ++k) {
    scale = std::max(scale, std::abs(mult * rhs.values[k]));
    dev = std::max(dev, std::abs(lhs.values[k] - mult * rhs.values[k]));
  }
  ScalingReport r;
  r.factor = factor;
  r.nodes_compared = gs.size();
  r.max_relative_deviation = scale > 0.0 ? dev / scale : dev;
  return r;
}

}  // namespace fracell
