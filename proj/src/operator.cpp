#include "fracell/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fracell {

DiscreteOperator::DiscreteOperator(Grid grid, BoundaryCondition bc, CoefficientField coeff, SparseMatrix matrix,
                                   std::vector<int> active)
    : grid_(std::move(grid)),
      bc_(bc),
      coeff_(std::move(coeff)),
      matrix_(std::move(matrix)),
      active_(std::move(active)),
      grid_to_active_(grid_.size(), -1) {
  for (int k = 0; k < static_cast<int>(active_.size()); ++k) grid_to_active_[active_[k]] = k;
}

Eigen::VectorXd DiscreteOperator::restrict(const GridFunction& u) const {
  if (!(u.grid == grid_)) throw Error("restrict: grid function lives on a different grid");
  Eigen::VectorXd v(size());
  for (int k = 0; k < size(); ++k) v[k] = u.values[active_[k]];
  return v;
}

GridFunction DiscreteOperator::extend(const Eigen::VectorXd& active_values) const {
  if (active_values.size() != size()) throw Error("extend: vector length does not match active nodes");
  GridFunction u(grid_);
  for (int k = 0; k < size(); ++k) u.values[active_[k]] = active_values[k];
  return u;
}

namespace {

bool eliminated(const Grid& g, const BoundaryCondition& bc, int flat) {
  for (int a = 0; a < g.dim(); ++a)
    if (bc.axis(a) == BcKind::Dirichlet && g.on_face(flat, a)) return true;
  return false;
}

}  // namespace

DiscreteOperator assemble(const Grid& grid, const CoefficientField& coeff, const BoundaryCondition& bc) {
  const int dim = grid.dim();
  const int n = grid.size();

  std::vector<Matrix2> nodal(n);
  for (int k = 0; k < n; ++k) {
    nodal[k] = coeff.at(grid.point(k));
    if (std::abs(nodal[k](0, 1) - nodal[k](1, 0)) > 0.0) throw Error("assemble: coefficient sample is not symmetric");
    if (dim == 2 && nodal[k](0, 1) != 0.0)
      throw Error("assemble: off-diagonal coefficients are not supported by the 5-point flux stencil");
  }
  auto report = ellipticity_check(coeff, grid);
  if (!report.pass) throw Error("assemble: coefficient samples violate the declared ellipticity bounds");

  std::vector<int> active;
  for (int k = 0; k < n; ++k)
    if (!eliminated(grid, bc, k)) active.push_back(k);
  std::vector<int> map(n, -1);
  for (int k = 0; k < static_cast<int>(active.size()); ++k) map[active[k]] = k;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(active.size() * (2 * dim + 1) * 2);
  for (int axis = 0; axis < dim; ++axis) {
    const double h2 = grid.spacing(axis) * grid.spacing(axis);
    for (int p = 0; p < n; ++p) {
      auto idx = grid.index(p);
      if (idx[axis] + 1 >= grid.nodes(axis)) continue;
      const int q = axis == 0 ? grid.flat(idx[0] + 1, idx[1]) : grid.flat(idx[0], idx[1] + 1);
      const int ap = map[p], aq = map[q];
      if (ap < 0 && aq < 0) continue;
      const double c = 0.5 * (nodal[p](axis, axis) + nodal[q](axis, axis)) / h2;
      if (ap >= 0) trip.emplace_back(ap, ap, c);
      if (aq >= 0) trip.emplace_back(aq, aq, c);
      if (ap >= 0 && aq >= 0) {
        trip.emplace_back(ap, aq, -c);
        trip.emplace_back(aq, ap, -c);
      }
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(active.size()), static_cast<Eigen::Index>(active.size()));
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return DiscreteOperator(grid, bc, coeff, std::move(m), std::move(active));
}

GridFunction apply(const DiscreteOperator& op, const GridFunction& u) {
  if (!(u.grid == op.grid())) throw Error("apply: shape mismatch between operator and grid function");
  Eigen::VectorXd v = op.matrix() * op.restrict(u);
  return op.extend(v);
}

EllipticityReport ellipticity_check(const CoefficientField& coeff, const Grid& grid) {
  const int dim = grid.dim();
  std::vector<Eigen::Vector2d> dirs;
  if (dim == 1) {
    dirs = {{1.0, 0.0}, {-1.0, 0.0}};
  } else {
    for (int k = 0; k < 64; ++k) {
      double th = 2.0 * std::numbers::pi * k / 64.0;
      dirs.emplace_back(std::cos(th), std::sin(th));
    }
  }
  EllipticityReport r;
  r.lambda1_observed = std::numeric_limits<double>::infinity();
  r.lambda2_observed = -std::numeric_limits<double>::infinity();
  bool symmetric = true;
  auto visit = [&](const Matrix2& a) {
    if (a(0, 1) != a(1, 0)) symmetric = false;
    for (const auto& d : dirs) {
      double q = dim == 1 ? a(0, 0) * d[0] * d[0] : d.dot(a * d);
      r.lambda1_observed = std::min(r.lambda1_observed, q);
      r.lambda2_observed = std::max(r.lambda2_observed, q);
    }
  };
  for (int k = 0; k < grid.size(); ++k) visit(coeff.at(grid.point(k)));
  const double tol = 1e-12;
  r.pass = symmetric && r.lambda1_observed >= coeff.lambda1() * (1.0 - tol) &&
           r.lambda2_observed <= coeff.lambda2() * (1.0 + tol);
  return r;
}

namespace {

void check_s(double s) {
  if (!(s > 0.0 && s < 1.0)) throw Error("hs_seminorm: s must lie in (0,1)");
}

}  // namespace

double hs_seminorm(const GridFunction& u, double s) {
  check_s(s);
  const Grid& g = u.grid;
  const int n = g.size();
  const double expo = 0.5 * (g.dim() + 2.0 * s);
  std::vector<Point> pts(n);
  for (int k = 0; k < n; ++k) pts[k] = g.point(k);
  double total = 0.0;
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double dx = pts[i][0] - pts[j][0], dy = pts[i][1] - pts[j][1];
      double d = u.values[i] - u.values[j];
      row += d * d / std::pow(dx * dx + dy * dy, expo);
    }
    total += row;
  }
  const double w = g.cell_volume();
  return total * w * w;
}

namespace serial {

double hs_seminorm(const GridFunction& u, double s) {
  check_s(s);
  const Grid& g = u.grid;
  double total = 0.0;
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j) {
      if (i == j) continue;
      double d = u.values[i] - u.values[j];
      total += d * d / std::pow(g.distance(i, j), g.dim() + 2.0 * s);
    }
  return total * g.cell_volume() * g.cell_volume();
}

}  // namespace serial

double inner(const GridFunction& u, const GridFunction& v) {
  if (!(u.grid == v.grid)) throw Error("inner: grids differ");
  return u.values.dot(v.values) * u.grid.cell_volume();
}

double l2_norm(const GridFunction& u) { return std::sqrt(inner(u, u)); }

}  // namespace fracell
