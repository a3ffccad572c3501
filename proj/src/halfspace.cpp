#include "fracell/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracell/fit.hpp"
#include "fracell/special.hpp"

namespace fracell {

namespace {

int mirror_axis(const Grid& g) { return g.dim() - 1; }

Grid doubled(const Grid& g) {
  std::vector<double> ext;
  std::vector<int> nodes;
  for (int a = 0; a < g.dim(); ++a) {
    const bool m = a == mirror_axis(g);
    ext.push_back(m ? 2.0 * g.extent(a) : g.extent(a));
    nodes.push_back(m ? 2 * g.nodes(a) - 1 : g.nodes(a));
  }
  return Grid(ext, nodes);
}

}  // namespace

GridFunction ReflectedFunction::restrict_to_half(const Grid& half) const {
  const Grid& full = function.grid;
  if (!(doubled(half) == full)) throw Error("restrict_to_half: grid is not the half of the symmetric grid");
  GridFunction out(half);
  const int c = half_nodes - 1;
  for (int p = 0; p < half.size(); ++p) {
    auto idx = half.index(p);
    idx[axis] += c;
    out.values[p] = function.values[full.flat(idx[0], idx[1])];
  }
  return out;
}

ReflectedFunction reflect(const GridFunction& u, Parity parity) {
  const Grid& g = u.grid;
  const int ax = mirror_axis(g);
  if (parity == Parity::Odd) {
    for (int p = 0; p < g.size(); ++p)
      if (g.index(p)[ax] == 0 && u.values[p] != 0.0)
        throw Error("reflect: odd reflection needs u = 0 on the face x_n = 0");
  }
  ReflectedFunction r;
  r.parity = parity;
  r.axis = ax;
  r.half_nodes = g.nodes(ax);
  r.function = GridFunction(doubled(g));
  const Grid& full = r.function.grid;
  const int c = g.nodes(ax) - 1;
  const double sign = parity == Parity::Odd ? -1.0 : 1.0;
  for (int p = 0; p < full.size(); ++p) {
    auto idx = full.index(p);
    const int k = idx[ax] - c;
    idx[ax] = std::abs(k);
    const double v = u.values[g.flat(idx[0], idx[1])];
    r.function.values[p] = k < 0 ? sign * v : v;
  }
  return r;
}

double parity_defect(const GridFunction& v, Parity parity) {
  const Grid& g = v.grid;
  const int ax = mirror_axis(g);
  if (g.nodes(ax) % 2 == 0) throw Error("parity_defect: symmetric grid needs an odd node count");
  const int c = (g.nodes(ax) - 1) / 2;
  const double sign = parity == Parity::Odd ? -1.0 : 1.0;
  double worst = 0.0;
  for (int p = 0; p < g.size(); ++p) {
    auto idx = g.index(p);
    const int k = idx[ax] - c;
    if (k < 0) continue;
    idx[ax] = c - k;
    worst = std::max(worst, std::abs(v.values[p] - sign * v.values[g.flat(idx[0], idx[1])]));
  }
  return worst;
}

double halfspace_kernel(const Point& x, const Point& z, int n, double s, Reflection bc) {
  if (n < 1 || n > 2) throw Error("halfspace_kernel: n must be 1 or 2");
  const int last = n - 1;
  if (!(x[last] > 0.0) || !(z[last] > 0.0)) throw Error("halfspace_kernel: points must lie in the open half-space");
  double d2 = 0.0, m2 = 0.0;
  for (int a = 0; a < n; ++a) {
    const double dz = x[a] - z[a];
    const double mz = a == last ? x[a] + z[a] : dz;
    d2 += dz * dz;
    m2 += mz * mz;
  }
  if (d2 == 0.0) throw Error("halfspace_kernel: coincident points");
  const double e = -0.5 * (n + 2.0 * s);
  const double sign = bc == Reflection::DirichletOdd ? -1.0 : 1.0;
  return fractional_laplacian_constant(n, s) * (std::pow(d2, e) + sign * std::pow(m2, e));
}

void HalfLineProblem::validate() const {
  if (!(s > 0.0 && s < 1.0)) throw Error("HalfLineProblem: s must lie in (0,1)");
  if (rhs == HalfLineRhs::One && !(s < 0.5)) throw Error("HalfLineProblem: f = 1 requires s < 1/2");
  if (rhs == HalfLineRhs::One && bc == Reflection::NeumannEven)
    throw Error("HalfLineProblem: f = 1 with the even reflection diverges");
  if (!(truncation > 0.0)) throw Error("HalfLineProblem: truncation length must be positive");
}

namespace {

constexpr double kQuadTol = 1e-14;

// Direct kernel r^{2s-1}, or ln(1/r) at s = 1/2.
double direct(double r, double s) { return s == 0.5 ? -std::log(r) : std::pow(r, 2.0 * s - 1.0); }

template <class F>
double tanh_sinh(F f, double a, double b) {
  static thread_local boost::math::quadrature::tanh_sinh<double> rule;
  if (b <= a) return 0.0;
  return rule.integrate(f, a, b, kQuadTol);
}

double halfline_value(const HalfLineProblem& p, double x) {
  const double s = p.s;
  const double sign = p.bc == Reflection::DirichletOdd ? -1.0 : 1.0;
  // Substitution v = |x - z| puts the kernel singularity at v = 0 exactly.
  auto left = [&](double v) { return direct(v, s) + sign * direct(2.0 * x - v, s); };   // z = x - v
  auto right = [&](double v) { return direct(v, s) + sign * direct(2.0 * x + v, s); };  // z = x + v
  if (p.rhs == HalfLineRhs::IndicatorUnit) {
    return tanh_sinh(left, 0.0, x) + tanh_sinh(right, 0.0, 1.0 - x);
  }
  const double q = 2.0 * s - 1.0;
  double near = tanh_sinh(left, 0.0, x) + tanh_sinh(right, 0.0, x);
  // (z - x)^q - (z + x)^q for z >= 2x without cancellation.
  auto tail = [&](double z) {
    const double r = x / z;
    return std::pow(z, q) * (std::expm1(q * std::log1p(-r)) - std::expm1(q * std::log1p(r)));
  };
  boost::math::quadrature::exp_sinh<double> far_rule;
  double far = far_rule.integrate([&](double t) { return tail(2.0 * x + t); }, kQuadTol);
  return near + far;
}

}  // namespace

std::vector<double> halfline_inverse_quadrature(const HalfLineProblem& problem, const std::vector<double>& xs) {
  problem.validate();
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    if (!(x > 0.0)) throw Error("halfline_inverse_quadrature: x must be positive");
    if (problem.rhs == HalfLineRhs::IndicatorUnit && !(x < 1.0))
      throw Error("halfline_inverse_quadrature: x must lie in (0,1) for the indicator datum");
    if (!(x < 0.5 * problem.truncation)) throw Error("halfline_inverse_quadrature: x must lie in (0, T/2)");
    out.push_back(halfline_value(problem, x));
  }
  return out;
}

double halfline_log_constant() {
  auto f = [](double w) { return std::log1p(w) - std::log(std::abs(1.0 - w)); };
  return tanh_sinh(f, 0.0, 1.0) + tanh_sinh(f, 1.0, 2.0);
}

double halfline_power_constant(double s) {
  if (!(s > 0.0 && s < 0.5)) throw Error("halfline_power_constant: s must lie in (0,1/2)");
  HalfLineProblem p{s, HalfLineRhs::One, Reflection::DirichletOdd, 16.0};
  return halfline_value(p, 1.0);
}

double closed_form_halfline(const HalfLineProblem& problem, double x) {
  problem.validate();
  const double s = problem.s;
  if (!(x > 0.0)) throw Error("closed_form_halfline: x must be positive");
  if (problem.rhs == HalfLineRhs::One) return std::pow(x, 2.0 * s);
  const double upper = s >= 0.5 ? 0.5 : 1.0;
  if (!(x < upper)) throw Error("closed_form_halfline: x outside the validity window of the closed form");
  if (problem.bc == Reflection::DirichletOdd) {
    if (s == 0.5) {
      const double c = 3.0 * std::log(3.0);
      return c * x + (1.0 + x) * std::log1p(x) - (1.0 - x) * std::log1p(-x) - 2.0 * x * std::log(x) - c * x;
    }
    return (2.0 * std::pow(x, 2.0 * s) + std::pow(1.0 - x, 2.0 * s) - std::pow(1.0 + x, 2.0 * s)) / (2.0 * s);
  }
  if (s == 0.5) return 2.0 - (1.0 - x) * std::log1p(-x) - (1.0 + x) * std::log1p(x);
  return (std::pow(1.0 - x, 2.0 * s) + std::pow(1.0 + x, 2.0 * s)) / (2.0 * s);
}

HalfLineComparison compare_halfline(const HalfLineProblem& problem, const std::vector<double>& xs) {
  if (xs.size() < 2) throw Error("compare_halfline: need at least two abscissae");
  HalfLineComparison c;
  c.x = xs;
  c.values = halfline_inverse_quadrature(problem, xs);
  double num = 0.0, den = 0.0, vmax = 0.0;
  std::vector<double> lx, lv;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cf = closed_form_halfline(problem, xs[i]);
    c.closed_form.push_back(cf);
    c.ratio.push_back(c.values[i] / cf);
    num += c.values[i] * cf;
    den += cf * cf;
    vmax = std::max(vmax, std::abs(c.values[i]));
    lx.push_back(std::log(xs[i]));
    lv.push_back(std::log(std::abs(c.values[i])));
  }
  c.constant = num / den;
  for (std::size_t i = 0; i < xs.size(); ++i)
    c.max_residual = std::max(c.max_residual, std::abs(c.values[i] - c.constant * c.closed_form[i]) / vmax);
  const auto [lo, hi] = std::minmax_element(c.ratio.begin(), c.ratio.end());
  double mean = 0.0;
  for (double r : c.ratio) mean += r;
  mean /= static_cast<double>(c.ratio.size());
  c.ratio_spread = (*hi - *lo) / std::abs(mean);
  c.slope = fit_line(lx, lv).slope;
  return c;
}

BoundaryGrowth boundary_growth_oracle(double s) {
  if (!(s > 0.0 && s < 1.0)) throw Error("boundary_growth_oracle: s must lie in (0,1)");
  return BoundaryGrowth{std::min(2.0 * s, 1.0), s == 0.5};
}

ReductionReport reduction_1d_check(const EigenBasis& strip, const EigenBasis& line,
                                   const std::function<double(double)>& phi, double s) {
  const Grid& g2 = strip.grid();
  const Grid& g1 = line.grid();
  if (g2.dim() != 2 || g1.dim() != 1) throw Error("reduction_1d_check: expects a 2D strip and a 1D line");
  if (strip.op().bc().axis(0) != BcKind::Neumann)
    throw Error("reduction_1d_check: incompatible lateral BC (the strip needs Neumann in x_0)");
  if (strip.op().bc().axis(1) != line.op().bc().axis(0))
    throw Error("reduction_1d_check: incompatible BC along x_1");
  if (g2.nodes(1) != g1.nodes(0) || std::abs(g2.extent(1) - g1.extent(0)) > 1e-14 * g1.extent(0))
    throw Error("reduction_1d_check: strip and line grids do not match along x_1");

  GridFunction g = GridFunction::sample(g2, [&](const Point& x) { return phi(x[1]); });
  g = strip.op().extend(strip.op().restrict(g));
  GridFunction f = GridFunction::sample(g1, [&](const Point& x) { return phi(x[0]); });
  f = line.op().extend(line.op().restrict(f));
  const GridFunction w2 = fractional_solve(strip, g, s);
  const GridFunction w1 = fractional_solve(line, f, s);
  ReductionReport r;
  r.solution_scale = w1.values.cwiseAbs().maxCoeff();
  for (int p = 0; p < g2.size(); ++p) {
    const int j = g2.index(p)[1];
    r.max_deviation = std::max(r.max_deviation, std::abs(w2.values[p] - w1.values[j]));
  }
  return r;
}

}  // namespace fracell
