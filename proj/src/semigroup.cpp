#include "fracell/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include "fracell/kernels.hpp"
#include "fracell/special.hpp"

namespace fracell {

GridFunction heat_apply(const EigenBasis& basis, const GridFunction& u, double t) {
  if (t < 0.0) throw Error("heat_apply: t must be nonnegative");
  if (t == 0.0) return u;
  return basis.apply_multiplier(u, [t](double lam) { return std::exp(-t * lam); });
}

GridFunction heat_apply_stepped(const DiscreteOperator& op, const GridFunction& u, double t, int steps,
                                TimeScheme scheme) {
  if (steps < 1) throw Error("heat_apply_stepped: steps must be at least 1");
  if (t < 0.0) throw Error("heat_apply_stepped: t must be nonnegative");
  const double dt = t / steps;
  const double theta = scheme == TimeScheme::Trapezoidal ? 0.5 : 1.0;
  SparseMatrix id(op.size(), op.size());
  id.setIdentity();
  SparseMatrix lhs = id + (theta * dt) * op.matrix();
  SparseMatrix rhs = id - ((1.0 - theta) * dt) * op.matrix();
  Eigen::SimplicialLDLT<SparseMatrix> solver(lhs);
  if (solver.info() != Eigen::Success) throw Error("heat_apply_stepped: factorization failed");
  Eigen::VectorXd v = op.restrict(u);
  for (int k = 0; k < steps; ++k) {
    v = solver.solve(rhs * v);
    if (solver.info() != Eigen::Success) throw Error("heat_apply_stepped: linear solve failed");
  }
  return op.extend(v);
}

namespace {

void check_s(double s, const char* who) {
  if (!(s > 0.0 && s < 1.0)) throw Error(fmt::format("{}: s must lie in (0,1)", who));
}

void check_balakrishnan(const EigenBasis& basis, double s, const SingularQuadrature& q, double tol, const char* who) {
  if (std::abs(q.power() - s) > 1e-14) throw Error(fmt::format("{}: quadrature exponent does not match s", who));
  const double lo = basis.lambda_min_positive(), hi = basis.lambda_max();
  const double r_lo = std::abs(balakrishnan_scalar(lo, s, q) / std::pow(lo, s) - 1.0);
  const double r_hi = std::abs(balakrishnan_scalar(hi, s, q) / std::pow(hi, s) - 1.0);
  if (r_lo > tol || r_hi > tol)
    throw Error(fmt::format("{}: uncalibrated quadrature (residual {:.3e} at lambda_min, {:.3e} at lambda_max)", who,
                            r_lo, r_hi));
}

KernelMatrix make_kernel(const EigenBasis& basis, KernelKind kind, double s, double param, const Eigen::VectorXd& c) {
  KernelMatrix k;
  k.kind = kind;
  k.s = s;
  k.param = param;
  k.grid = basis.grid();
  k.active = basis.op().active();
  k.entries = kernels::spectral_sum(basis.vectors(), c);
  return k;
}

}  // namespace

GridFunction balakrishnan_apply(const EigenBasis& basis, const GridFunction& u, double s,
                                const SingularQuadrature& q, double tol) {
  check_s(s, "balakrishnan_apply");
  check_balakrishnan(basis, s, q, tol, "balakrishnan_apply");
  return basis.apply_multiplier(u, [&](double lam) { return lam == 0.0 ? 0.0 : balakrishnan_scalar(lam, s, q); });
}

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Ks: return "Ks";
    case KernelKind::Gs: return "Gs";
    case KernelKind::Wt: return "Wt";
    case KernelKind::Poisson: return "Poisson";
    case KernelKind::KsNeumann: return "KsNeumann";
  }
  return "unknown";
}

double KernelMatrix::symmetry_error() const { return kernels::asymmetry(entries); }

double KernelMatrix::min_relative_entry() const {
  const bool skip_diag = kind == KernelKind::Ks || kind == KernelKind::KsNeumann;
  double lo = std::numeric_limits<double>::infinity(), scale = 0.0;
  for (Eigen::Index j = 0; j < entries.cols(); ++j)
    for (Eigen::Index i = 0; i < entries.rows(); ++i) {
      if (skip_diag && i == j) continue;
      lo = std::min(lo, entries(i, j));
      scale = std::max(scale, std::abs(entries(i, j)));
    }
  return scale > 0.0 ? lo / scale : 0.0;
}

Eigen::VectorXd KernelMatrix::row_integrals() const { return entries.rowwise().sum() * weight(); }

KernelMatrix heat_kernel(const EigenBasis& basis, double t) {
  if (!(t > 0.0)) throw Error("heat_kernel: t must be positive");
  Eigen::VectorXd c = (-t * basis.eigenvalues().array()).exp().matrix();
  return make_kernel(basis, KernelKind::Wt, 0.0, t, c);
}

KernelMatrix kernel_Ks(const EigenBasis& basis, double s, const SingularQuadrature& q, double tol) {
  check_s(s, "kernel_Ks");
  check_balakrishnan(basis, s, q, tol, "kernel_Ks");
  // Off the diagonal the identity density vanishes, so int W_t dt/t^{1+s}
  // equals the finite integral of W_t - delta, mode by mode.
  const double norm = 1.0 / (2.0 * std::abs(std::tgamma(-s)));
  Eigen::VectorXd c(basis.count());
  for (int k = 0; k < basis.count(); ++k) {
    const double lam = basis.eigenvalues()[k];
    c[k] = lam == 0.0 ? 0.0 : norm * q.difference_integral(lam);
  }
  KernelMatrix km =
      make_kernel(basis, basis.neumann_kernel() ? KernelKind::KsNeumann : KernelKind::Ks, s, 0.0, c);
  km.entries.diagonal().setZero();
  return km;
}

BsFunction function_Bs(const EigenBasis& basis, double s, const SingularQuadrature& q, double tol) {
  check_s(s, "function_Bs");
  check_balakrishnan(basis, s, q, tol, "function_Bs");
  const double norm = 1.0 / std::abs(std::tgamma(-s));
  GridFunction one = basis.op().extend(Eigen::VectorXd::Ones(basis.op().size()));
  GridFunction b = basis.apply_multiplier(
      one, [&](double lam) { return lam == 0.0 ? 0.0 : -norm * q.difference_integral(lam); });
  BsFunction out;
  out.s = s;
  out.grid = basis.grid();
  out.active = basis.op().active();
  out.values = basis.op().restrict(b);
  return out;
}

namespace {

void check_bilinear(const GridFunction& u, const GridFunction& psi, const KernelMatrix& ks, const BsFunction& bs) {
  if (!(u.grid == ks.grid) || !(psi.grid == ks.grid) || !(bs.grid == ks.grid))
    throw Error("bilinear_form: inputs live on different grids");
  if (bs.active != ks.active) throw Error("bilinear_form: kernel and B_s use different active sets");
}

Eigen::VectorXd gather(const GridFunction& u, const std::vector<int>& active) {
  Eigen::VectorXd v(active.size());
  for (std::size_t k = 0; k < active.size(); ++k) v[k] = u.values[active[k]];
  return v;
}

}  // namespace

double bilinear_form(const GridFunction& u, const GridFunction& psi, const KernelMatrix& ks, const BsFunction& bs) {
  check_bilinear(u, psi, ks, bs);
  const Eigen::VectorXd a = gather(u, ks.active), b = gather(psi, ks.active);
  const double w = ks.weight();
  return kernels::pair_form(a, b, ks.entries) * w * w + a.cwiseProduct(b).dot(bs.values) * w;
}

namespace serial {

double bilinear_form(const GridFunction& u, const GridFunction& psi, const KernelMatrix& ks, const BsFunction& bs) {
  check_bilinear(u, psi, ks, bs);
  const Eigen::VectorXd a = gather(u, ks.active), b = gather(psi, ks.active);
  const double w = ks.weight();
  double local = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) local += a[i] * b[i] * bs.values[i];
  return kernels::serial::pair_form(a, b, ks.entries) * w * w + local * w;
}

}  // namespace serial

KernelMatrix greens_function(const EigenBasis& basis, double s, GreensRoute route, const SingularQuadrature* q) {
  check_s(s, "greens_function");
  if (basis.neumann_kernel()) throw Error("greens_function: requires a Dirichlet operator");
  Eigen::VectorXd c(basis.count());
  if (route == GreensRoute::Series) {
    for (int k = 0; k < basis.count(); ++k) c[k] = std::pow(basis.eigenvalues()[k], -s);
  } else {
    if (q == nullptr) throw Error("greens_function: quadrature route needs a rule");
    if (std::abs(q->power() + s) > 1e-14) throw Error("greens_function: quadrature exponent must be -s");
    for (int k = 0; k < basis.count(); ++k) c[k] = inverse_power_scalar(basis.eigenvalues()[k], s, *q);
    const double r = std::max(std::abs(c[0] * std::pow(basis.lambda_min(), s) - 1.0),
                              std::abs(c[c.size() - 1] * std::pow(basis.lambda_max(), s) - 1.0));
    if (r > 1e-8) throw Error(fmt::format("greens_function: quadrature residual {:.3e}", r));
  }
  return make_kernel(basis, KernelKind::Gs, s, 0.0, c);
}

KernelMatrix poisson_kernel(const EigenBasis& basis, double s, double y, const SingularQuadrature& q) {
  check_s(s, "poisson_kernel");
  if (!(y > 0.0)) throw Error("poisson_kernel: y must be positive");
  if (std::abs(q.power() - s) > 1e-14) throw Error("poisson_kernel: quadrature exponent does not match s");
  Eigen::VectorXd c(basis.count());
  double worst = 0.0;
  for (int k = 0; k < basis.count(); ++k) {
    const double lam = basis.eigenvalues()[k];
    c[k] = poisson_scalar(lam, s, y, q);
    if (k == 0 || k == basis.count() - 1)
      worst = std::max(worst, std::abs(c[k] - extension_profile(s, std::sqrt(lam) * y)));
  }
  if (worst > 1e-6) throw Error(fmt::format("poisson_kernel: quadrature residual {:.3e}", worst));
  return make_kernel(basis, KernelKind::Poisson, s, y, c);
}

namespace {

double boundary_distance(const Grid& g, int flat) {
  double d = std::numeric_limits<double>::infinity();
  for (int a = 0; a < g.dim(); ++a) {
    const double x = g.coord(flat, a);
    d = std::min({d, x, g.extent(a) - x});
  }
  return d;
}

template <class Visit>
void visit_window(const KernelMatrix& k, const PairWindow& w, Visit visit) {
  std::vector<int> inner;
  for (int i = 0; i < k.size(); ++i)
    if (boundary_distance(k.grid, k.active[i]) >= w.margin) inner.push_back(i);
  for (std::size_t a = 0; a < inner.size(); ++a)
    for (std::size_t b = a + 1; b < inner.size(); ++b) {
      const double d = k.distance(inner[a], inner[b]);
      if (d >= w.min_dist && d <= w.max_dist) visit(d, k.entries(inner[a], inner[b]));
    }
}

}  // namespace

KernelFit kernel_slope_fit(const KernelMatrix& k, const PairWindow& window) {
  std::vector<double> x, y;
  visit_window(k, window, [&](double d, double v) {
    if (v > 0.0) {
      x.push_back(std::log(d));
      y.push_back(std::log(v));
    }
  });
  if (x.size() < 2) throw Error("kernel_slope_fit: fewer than two usable pairs in the window");
  LineFit f = fit_line(x, y);
  return KernelFit{k.kind, k.s, f.slope, f.intercept, f.rmse, f.r2, f.points};
}

KernelFit kernel_log_fit(const KernelMatrix& k, const PairWindow& window) {
  std::vector<double> x, y;
  visit_window(k, window, [&](double d, double v) {
    x.push_back(std::log(1.0 / d));
    y.push_back(v);
  });
  if (x.size() < 2) throw Error("kernel_log_fit: fewer than two usable pairs in the window");
  LineFit f = fit_line(x, y);
  return KernelFit{k.kind, k.s, f.slope, f.intercept, f.rmse, f.r2, f.points};
}

double ks_normalized_max(const KernelMatrix& ks) {
  const double expo = ks.grid.dim() + 2.0 * ks.s;
  double best = 0.0;
  for (int i = 0; i < ks.size(); ++i)
    for (int j = i + 1; j < ks.size(); ++j)
      best = std::max(best, ks.entries(i, j) * std::pow(ks.distance(i, j), expo));
  return best;
}

BoundaryShapeReport ks_boundary_shape(const KernelMatrix& ks, const EigenBasis& basis, double min_dist) {
  if (basis.op().active() != ks.active) throw Error("ks_boundary_shape: basis and kernel differ");
  const double expo = ks.grid.dim() + 2.0 * ks.s;
  Eigen::VectorXd phi0 = basis.vectors().col(0).cwiseAbs();
  phi0 /= phi0.maxCoeff();
  double sum_log = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  int count = 0;
  for (int i = 0; i < ks.size(); ++i)
    for (int j = i + 1; j < ks.size(); ++j) {
      const double d = ks.distance(i, j);
      if (d < min_dist || ks.entries(i, j) <= 0.0) continue;
      const double shape = phi0[i] * phi0[j] / (d * d);
      if (shape <= 0.0) continue;
      const double ratio = ks.entries(i, j) * std::pow(d, expo) / std::min(1.0, shape);
      sum_log += std::log(ratio);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      ++count;
    }
  BoundaryShapeReport r;
  r.pairs_used = count;
  if (count > 0) {
    r.constant = std::exp(sum_log / count);
    r.spread = hi / lo;
  }
  return r;
}

GaussianBoundReport gaussian_bound(const EigenBasis& basis, const std::vector<double>& times, double c) {
  if (!(c > 0.0)) throw Error("gaussian_bound: c must be positive");
  GaussianBoundReport r;
  r.c = c;
  const double half_n = 0.5 * basis.grid().dim();
  for (double t : times) {
    KernelMatrix w = heat_kernel(basis, t);
    // Far entries are round-off from the spectral sum; they carry no information.
    const double noise = 1e-10 * w.entries.cwiseAbs().maxCoeff();
    for (int i = 0; i < w.size(); ++i)
      for (int j = 0; j < w.size(); ++j) {
        if (w.entries(i, j) <= noise) continue;
        const double d = w.distance(i, j);
        const double bound_shape = std::exp(-d * d / (c * t)) / std::pow(t, half_n);
        if (bound_shape <= 0.0) continue;
        r.constant = std::max(r.constant, w.entries(i, j) / bound_shape);
        ++r.samples;
      }
  }
  return r;
}

}  // namespace fracell
