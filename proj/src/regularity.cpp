#include "fracell/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/QR>

#include "fracell/fit.hpp"

namespace fracell {

namespace {

double dist2(const Point& a, const Point& b, int dim) {
  double d = 0.0;
  for (int k = 0; k < dim; ++k) d += (a[k] - b[k]) * (a[k] - b[k]);
  return d;
}

std::vector<int> ball(const Grid& g, const Point& c, double r) {
  std::vector<int> out;
  const double r2 = r * r * (1.0 + 1e-12);
  for (int p = 0; p < g.size(); ++p)
    if (dist2(g.point(p), c, g.dim()) <= r2) out.push_back(p);
  return out;
}

int nearest_node(const Grid& g, const Point& c) {
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (int p = 0; p < g.size(); ++p) {
    const double d = dist2(g.point(p), c, g.dim());
    if (d < bd) bd = d, best = p;
  }
  return best;
}

// Residual of f on the node set after removing the reference part selected by mode.
Eigen::VectorXd detrend(const GridFunction& f, const std::vector<int>& nodes, const Point& c, CampanatoMode mode) {
  const int m = static_cast<int>(nodes.size());
  Eigen::VectorXd v(m);
  for (int i = 0; i < m; ++i) v[i] = f.values[nodes[i]];
  if (mode == CampanatoMode::Raw) return v;
  if (mode == CampanatoMode::Oscillation) return (v.array() - v.mean()).matrix();
  const int dim = f.grid.dim();
  if (mode == CampanatoMode::Anchored) return (v.array() - f.values[nearest_node(f.grid, c)]).matrix();
  Eigen::MatrixXd design(m, dim + 1);
  for (int i = 0; i < m; ++i) {
    const Point x = f.grid.point(nodes[i]);
    design(i, 0) = 1.0;
    for (int a = 0; a < dim; ++a) design(i, a + 1) = x[a] - c[a];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(v);
  return v - design * coef;
}

}  // namespace

void CampanatoProbe::validate(const Grid& grid) const {
  if (radii.size() < 4) throw Error("CampanatoProbe: at least 4 radii are required for a fit");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0)) throw Error("CampanatoProbe: radii must be positive");
    if (k > 0 && !(radii[k] < radii[k - 1])) throw Error("CampanatoProbe: radii must decrease strictly");
  }
  for (int a = 0; a < grid.dim(); ++a) {
    if (center[a] - radii.front() < -1e-12 || center[a] + radii.front() > grid.extent(a) + 1e-12)
      throw Error("CampanatoProbe: ball exits the grid");
  }
}

std::vector<double> dyadic_radii(const Grid& grid, double largest) {
  double h = grid.spacing(0);
  for (int a = 1; a < grid.dim(); ++a) h = std::max(h, grid.spacing(a));
  std::vector<double> r;
  for (double x = largest; x >= 4.0 * h * (1.0 - 1e-12); x *= 0.5) r.push_back(x);
  return r;
}

std::vector<double> mean_oscillation(const GridFunction& f, const Point& center, const std::vector<double>& radii,
                                     CampanatoMode mode) {
  std::vector<double> out;
  for (double r : radii) {
    const auto nodes = ball(f.grid, center, r);
    if (nodes.size() < static_cast<std::size_t>(f.grid.dim() + 2))
      throw Error("mean_oscillation: ball contains too few nodes");
    out.push_back(detrend(f, nodes, center, mode).squaredNorm() / static_cast<double>(nodes.size()));
  }
  return out;
}

double campanato_seminorm(const GridFunction& f, const CampanatoProbe& probe) {
  probe.validate(f.grid);
  const Grid& g = f.grid;
  const int dim = g.dim();
  // Reference part from the smallest ball: its mean, the centre value, or its
  // least-squares affine fit.
  const auto small = ball(g, probe.center, probe.radii.back());
  if (small.empty()) throw Error("campanato_seminorm: smallest ball contains no nodes");
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(dim + 1);
  Eigen::VectorXd v(small.size());
  for (std::size_t i = 0; i < small.size(); ++i) v[i] = f.values[small[i]];
  if (probe.mode == CampanatoMode::Anchored) {
    coef[0] = f.values[nearest_node(g, probe.center)];
  } else if (probe.mode == CampanatoMode::Oscillation ||
             (probe.mode == CampanatoMode::Linear && small.size() <= static_cast<std::size_t>(dim + 1))) {
    coef[0] = v.mean();
  } else if (probe.mode == CampanatoMode::Linear) {
    Eigen::MatrixXd design(small.size(), dim + 1);
    for (std::size_t i = 0; i < small.size(); ++i) {
      const Point x = g.point(small[i]);
      design(i, 0) = 1.0;
      for (int a = 0; a < dim; ++a) design(i, a + 1) = x[a] - probe.center[a];
    }
    coef = design.colPivHouseholderQr().solve(v);
  }
  double best = 0.0;
  for (double r : probe.radii) {
    double acc = 0.0;
    for (int p : ball(g, probe.center, r)) {
      const Point x = g.point(p);
      double ref = coef[0];
      for (int a = 0; a < dim; ++a) ref += coef[a + 1] * (x[a] - probe.center[a]);
      acc += (f.values[p] - ref) * (f.values[p] - ref);
    }
    best = std::max(best, acc * g.cell_volume() / std::pow(r, dim + 2.0 * probe.alpha));
  }
  return best;
}

ExponentFit interior_exponent(const GridFunction& u, const Point& x0, CampanatoMode mode, std::vector<double> radii) {
  const Grid& g = u.grid;
  if (radii.empty()) {
    double e = g.extent(0);
    for (int a = 1; a < g.dim(); ++a) e = std::min(e, g.extent(a));
    radii = dyadic_radii(g, 0.25 * e);
  }
  if (radii.size() < 6) throw Error("interior_exponent: insufficient radii (need 4 after dropping the two smallest)");
  radii.resize(radii.size() - 2);
  CampanatoProbe probe{x0, radii, 0.0, mode};
  probe.validate(g);
  const std::vector<double> m = mean_oscillation(u, x0, radii, mode);
  const double scale = std::max(u.values.cwiseAbs().maxCoeff(), 1e-300);
  const double floor = 1e-32 * scale * scale;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    lx.push_back(std::log(radii[k]));
    ly.push_back(std::log(std::max(m[k], floor)));
  }
  const LineFit f = fit_line(lx, ly);
  return ExponentFit{f.slope, f.intercept, f.rmse, 0.5 * f.slope, radii};
}

ExponentFit boundary_exponent(const GridFunction& u, const Point& x0, int axis, double d_min, double d_max) {
  const Grid& g = u.grid;
  if (axis < 0 || axis >= g.dim()) throw Error("boundary_exponent: invalid axis");
  const double face = x0[axis];
  if (std::abs(face) > 1e-12 && std::abs(face - g.extent(axis)) > 1e-12)
    throw Error("boundary_exponent: x0 must lie on a face normal to the axis");
  if (!(d_min > 0.0 && d_max > d_min)) throw Error("boundary_exponent: need 0 < d_min < d_max");
  std::vector<double> lx, ly, dists;
  const double tol = 0.5 * (g.dim() == 2 ? g.spacing(1 - axis) : 1.0);
  for (int p = 0; p < g.size(); ++p) {
    const Point x = g.point(p);
    if (g.dim() == 2 && std::abs(x[1 - axis] - x0[1 - axis]) > tol) continue;
    const double d = std::abs(x[axis] - face);
    if (d < d_min * (1.0 - 1e-12) || d > d_max * (1.0 + 1e-12)) continue;
    if (u.values[p] == 0.0) continue;
    lx.push_back(std::log(d));
    ly.push_back(std::log(std::abs(u.values[p])));
    dists.push_back(d);
  }
  if (lx.size() < 4) throw Error("boundary_exponent: u vanishes near x0 or the window holds fewer than 4 nodes");
  const LineFit f = fit_line(lx, ly);
  return ExponentFit{f.slope, f.intercept, f.rmse, f.slope, dists};
}

std::vector<double> discrete_halfline_profile(double s, double h, double truncation, int count) {
  if (!(s > 0.0 && s <= 1.0)) throw Error("discrete_halfline_profile: s must lie in (0,1]");
  const int n = static_cast<int>(std::lround(truncation / h));
  if (n < 4 || std::abs(n * h - truncation) > 1e-9 * truncation)
    throw Error("discrete_halfline_profile: truncation must be a multiple of h");
  if (count < 1 || count >= n) throw Error("discrete_halfline_profile: invalid node count");
  std::vector<double> w(count, 0.0);
  const double pi = std::numbers::pi;
  // Odd modes only: sum_j sin(k pi j / n) = cot(k pi / (2n)) for odd k, 0 for even k.
  for (int k = 1; k < n; k += 2) {
    const double th = k * pi / (2.0 * n);
    const double lam = 4.0 / (h * h) * std::sin(th) * std::sin(th);
    const double c = std::pow(lam, -s) * h * (2.0 / truncation) * std::cos(th) / std::sin(th);
    for (int j = 1; j <= count; ++j) w[j - 1] += c * std::sin(2.0 * th * j);
  }
  return w;
}

GridFunction dirichlet_layer_split(const GridFunction& u, double f_at_x0, const Point& x0, double s,
                                   double truncation) {
  const Grid& g = u.grid;
  if (g.dim() != 1) throw Error("dirichlet_layer_split: only 1D grids are supported");
  const double face = x0[0];
  if (std::abs(face) > 1e-12 && std::abs(face - g.extent(0)) > 1e-12)
    throw Error("dirichlet_layer_split: x0 must be an end point of the interval");
  if (f_at_x0 == 0.0) return u;
  const double h = g.spacing(0);
  const std::vector<double> w = discrete_halfline_profile(s, h, truncation, g.nodes(0) - 1);
  GridFunction v = u;
  for (int p = 0; p < g.size(); ++p) {
    const int m = static_cast<int>(std::lround(std::abs(g.coord(p, 0) - face) / h));
    if (m > 0) v.values[p] -= f_at_x0 * w[m - 1];
  }
  return v;
}

HarnackReport harnack_quotient(const EigenBasis& basis, const GridFunction& f, const Point& center, double radius,
                               double s) {
  const Grid& g = basis.grid();
  if (!(f.grid == g)) throw Error("harnack_quotient: f lives on a different grid");
  if (!(radius > 0.0)) throw Error("harnack_quotient: radius must be positive");
  const double scale = f.values.cwiseAbs().maxCoeff();
  for (int p = 0; p < g.size(); ++p) {
    if (f.values[p] < -1e-14 * scale) throw Error("harnack_quotient: f must be nonnegative");
    if (f.values[p] != 0.0 && dist2(g.point(p), center, g.dim()) < radius * radius)
      throw Error("harnack_quotient: f must vanish on the ball");
  }
  const GridFunction u = fractional_solve(basis, f, s);
  HarnackReport r;
  r.sup = -std::numeric_limits<double>::infinity();
  r.inf = std::numeric_limits<double>::infinity();
  for (int p : ball(g, center, 0.5 * radius)) {
    r.sup = std::max(r.sup, u.values[p]);
    r.inf = std::min(r.inf, u.values[p]);
  }
  r.admissible = r.inf > 0.0;
  r.quotient = r.admissible ? r.sup / r.inf : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace fracell
