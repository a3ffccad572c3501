#include "fracell/grid.hpp"

#include <cmath>
#include <numbers>

namespace fracell {

Grid::Grid(std::vector<double> extents, std::vector<int> nodes)
    : extents_(std::move(extents)), nodes_(std::move(nodes)) {
  if (extents_.size() != nodes_.size() || nodes_.empty() || nodes_.size() > 2) {
    throw Error("grid: dimension must be 1 or 2 with one extent per axis");
  }
  for (std::size_t a = 0; a < nodes_.size(); ++a) {
    if (nodes_[a] < 3) throw Error("grid: need at least 3 nodes per axis");
    if (!(extents_[a] > 0.0) || !std::isfinite(extents_[a])) throw Error("grid: extents must be positive");
  }
}

int Grid::size() const {
  int n = 1;
  for (int k : nodes_) n *= k;
  return n;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= spacing(a);
  return v;
}

std::array<int, 2> Grid::index(int flat) const {
  if (dim() == 1) return {flat, 0};
  return {flat % nodes_[0], flat / nodes_[0]};
}

double Grid::coord(int flat, int axis) const { return index(flat)[axis] * spacing(axis); }

Point Grid::point(int flat) const {
  auto idx = index(flat);
  Point p{idx[0] * spacing(0), 0.0};
  if (dim() == 2) p[1] = idx[1] * spacing(1);
  return p;
}

bool Grid::on_face(int flat, int axis) const {
  int i = index(flat)[axis];
  return i == 0 || i == nodes_[axis] - 1;
}

bool Grid::on_boundary(int flat) const {
  for (int a = 0; a < dim(); ++a)
    if (on_face(flat, a)) return true;
  return false;
}

double Grid::distance(int a, int b) const {
  Point pa = point(a), pb = point(b);
  return std::hypot(pa[0] - pb[0], pa[1] - pb[1]);
}

Grid Grid::scaled(double factor) const {
  std::vector<double> e = extents_;
  for (double& x : e) x *= factor;
  return Grid(e, nodes_);
}

GridFunction::GridFunction(Grid g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw Error("grid function: length does not match grid");
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(const Point&)>& fn) {
  GridFunction f(g);
  for (int k = 0; k < g.size(); ++k) f.values[k] = fn(g.point(k));
  return f;
}

CoefficientField::CoefficientField(Fn fn, double lambda1, double lambda2, std::string description)
    : fn_(std::move(fn)), lambda1_(lambda1), lambda2_(lambda2), description_(std::move(description)) {
  if (!(lambda1_ > 0.0)) throw Error("coefficients: lambda1 must be positive");
  if (lambda2_ < lambda1_) throw Error("coefficients: lambda2 must be >= lambda1");
}

CoefficientField CoefficientField::identity() {
  return CoefficientField([](const Point&) { return Matrix2::Identity().eval(); }, 1.0, 1.0, "identity");
}

CoefficientField CoefficientField::scalar(std::function<double(const Point&)> a, double lambda1, double lambda2,
                                          std::string description) {
  return CoefficientField([a = std::move(a)](const Point& x) { return (a(x) * Matrix2::Identity()).eval(); },
                          lambda1, lambda2, std::move(description));
}

CoefficientField CoefficientField::diagonal(double a11, double a22) {
  Matrix2 m;
  m << a11, 0.0, 0.0, a22;
  return CoefficientField([m](const Point&) { return m; }, std::min(a11, a22), std::max(a11, a22), "diagonal");
}

CoefficientField CoefficientField::sine(double amplitude) {
  return scalar([amplitude](const Point& x) { return 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * x[0]); },
                1.0 - std::abs(amplitude), 1.0 + std::abs(amplitude), "sine");
}

BcKind BoundaryCondition::kind(int dim) const {
  if (!uniform(dim)) throw Error("boundary condition: mixed condition has no single kind");
  return axes_[0];
}

bool BoundaryCondition::any_dirichlet(int dim) const {
  for (int a = 0; a < dim; ++a)
    if (axes_[a] == BcKind::Dirichlet) return true;
  return false;
}

std::string BoundaryCondition::name(int dim) const {
  if (uniform(dim)) return to_string(axes_[0]);
  return "mixed(" + to_string(axes_[0]) + "," + to_string(axes_[1]) + ")";
}

BcKind parse_bc_kind(const std::string& s) {
  if (s == "dirichlet" || s == "Dirichlet") return BcKind::Dirichlet;
  if (s == "neumann" || s == "Neumann") return BcKind::Neumann;
  throw Error("unknown boundary condition '" + s + "'");
}

std::string to_string(BcKind k) { return k == BcKind::Dirichlet ? "dirichlet" : "neumann"; }

}  // namespace fracell
