#include "fracell/extension.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include "fracell/special.hpp"

namespace fracell {

ExtensionMesh ExtensionMesh::graded(const Grid& base, double s, double height, int layers, double gamma) {
  if (!(s > 0.0 && s < 1.0)) throw Error("ExtensionMesh: s must lie in (0,1), i.e. a in (-1,1)");
  if (!(height > 0.0)) throw Error("ExtensionMesh: height must be positive");
  if (layers < 4) throw Error("ExtensionMesh: need at least 4 layers");
  ExtensionMesh m;
  m.base = base;
  m.s = s;
  m.a = 1.0 - 2.0 * s;
  m.height = height;
  m.gamma = gamma > 0.0 ? gamma : std::max(3.0, 1.0 / s);
  if (m.gamma < 1.0) throw Error("ExtensionMesh: grading exponent must be at least 1");
  m.y.resize(layers + 1);
  for (int j = 0; j <= layers; ++j) m.y[j] = height * std::pow(static_cast<double>(j) / layers, m.gamma);
  m.y[layers] = height;

  const double a = m.a;
  auto moment = [](double p, double l, double r) { return (std::pow(r, p) - std::pow(l, p)) / p; };
  m.mass.assign(layers + 1, 0.0);
  m.stiffness.resize(layers);
  m.cell_weight.resize(layers);
  for (int c = 0; c < layers; ++c) {
    const double l = m.y[c], r = m.y[c + 1], h = r - l;
    const double i0 = moment(a + 1.0, l, r);
    const double i1 = moment(a + 2.0, l, r);
    m.cell_weight[c] = i0;
    m.mass[c] += (r * i0 - i1) / h;
    m.mass[c + 1] += (i1 - l * i0) / h;
    m.stiffness[c] = 2.0 * s / (std::pow(r, 2.0 * s) - std::pow(l, 2.0 * s));
  }
  return m;
}

double truncation_height(double s, double lambda, double tol) {
  if (!(lambda > 0.0)) throw Error("truncation_height: lambda must be positive");
  double z = 1.0;
  while (extension_profile(s, z) > tol) z *= 1.25;
  double lo = z / 1.25, hi = z;
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    (extension_profile(s, mid) > tol ? lo : hi) = mid;
  }
  return hi / std::sqrt(lambda);
}

namespace {

// Block-tridiagonal weighted system over layers first..M-1 (the lid is zero).
SparseMatrix cylinder_matrix(const DiscreteOperator& op, const ExtensionMesh& mesh, int first) {
  const int n = op.size();
  const int m = mesh.layers();
  const int blocks = m - first;
  const double w = op.weight();
  const SparseMatrix& lap = op.matrix();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(blocks) * (lap.nonZeros() + 3 * n));
  for (int j = first; j < m; ++j) {
    const int row0 = (j - first) * n;
    for (int outer = 0; outer < lap.outerSize(); ++outer)
      for (SparseMatrix::InnerIterator it(lap, outer); it; ++it)
        trip.emplace_back(row0 + it.row(), row0 + it.col(), w * mesh.mass[j] * it.value());
    const double diag = w * ((j > 0 ? mesh.stiffness[j - 1] : 0.0) + mesh.stiffness[j]);
    for (int i = 0; i < n; ++i) {
      trip.emplace_back(row0 + i, row0 + i, diag);
      if (j + 1 < m) {
        trip.emplace_back(row0 + i, row0 + n + i, -w * mesh.stiffness[j]);
        trip.emplace_back(row0 + n + i, row0 + i, -w * mesh.stiffness[j]);
      }
    }
  }
  SparseMatrix a(static_cast<Eigen::Index>(blocks) * n, static_cast<Eigen::Index>(blocks) * n);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

void check_mesh(const DiscreteOperator& op, const ExtensionMesh& mesh) {
  if (!(mesh.base == op.grid())) throw Error("extension: mesh base differs from the operator grid");
  if (!(mesh.a > -1.0 && mesh.a < 1.0)) throw Error("extension: a must lie in (-1,1)");
}

Eigen::VectorXd solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, int dim, int& iterations,
                          double& residual) {
  Eigen::VectorXd x;
  if (dim == 1) {
    Eigen::SimplicialLDLT<SparseMatrix> solver(a);
    if (solver.info() != Eigen::Success) throw Error("extension: factorization failed");
    x = solver.solve(b);
    if (solver.info() != Eigen::Success) throw Error("extension: linear solve failed");
    iterations = 0;
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> solver;
    solver.setTolerance(1e-13);
    solver.setMaxIterations(20000);
    solver.compute(a);
    if (solver.info() != Eigen::Success) throw Error("extension: preconditioner setup failed");
    x = solver.solve(b);
    if (solver.info() != Eigen::Success)
      throw Error(fmt::format("extension: CG did not converge (error {:.3e})", solver.error()));
    iterations = static_cast<int>(solver.iterations());
  }
  const double bn = b.norm();
  residual = bn > 0.0 ? (a * x - b).norm() / bn : (a * x).norm();
  return x;
}

}  // namespace

ExtensionField solve_extension(const DiscreteOperator& op, const GridFunction& u, const ExtensionMesh& mesh) {
  check_mesh(op, mesh);
  if (!(u.grid == op.grid())) throw Error("solve_extension: trace lives on a different grid");
  const int n = op.size(), m = mesh.layers();
  const Eigen::VectorXd trace = op.restrict(u);
  const SparseMatrix a = cylinder_matrix(op, mesh, 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a.rows());
  rhs.head(n) = op.weight() * mesh.stiffness[0] * trace;

  ExtensionField f{mesh, op, Eigen::MatrixXd::Zero(n, m + 1)};
  f.values.col(0) = trace;
  if (trace.cwiseAbs().maxCoeff() == 0.0) return f;
  const Eigen::VectorXd x = solve_spd(a, rhs, op.grid().dim(), f.iterations, f.solver_residual);
  for (int j = 1; j < m; ++j) f.values.col(j) = x.segment((j - 1) * n, n);
  return f;
}

namespace {

// int y^a F . grad_x v summed per layer, with F averaged onto faces.
void add_forcing(const DiscreteOperator& op, const ExtensionMesh& mesh, const ForcingData& data,
                 Eigen::VectorXd& rhs) {
  const Grid& g = op.grid();
  if (data.field.empty()) return;
  if (static_cast<int>(data.field.size()) != g.dim())
    throw Error("solve_extension_forced: F needs one component per base axis (F_{n+1} = 0)");
  const int n = op.size(), m = mesh.layers();
  const double w = op.weight();
  for (int axis = 0; axis < g.dim(); ++axis) {
    const Eigen::MatrixXd& fa = data.field[axis];
    if (fa.rows() != n || fa.cols() != m + 1) throw Error("solve_extension_forced: F has the wrong shape");
    const double h = g.spacing(axis);
    for (int p = 0; p < g.size(); ++p) {
      auto idx = g.index(p);
      if (idx[axis] + 1 >= g.nodes(axis)) continue;
      const int q = axis == 0 ? g.flat(idx[0] + 1, idx[1]) : g.flat(idx[0], idx[1] + 1);
      const int ap = op.active_index(p), aq = op.active_index(q);
      for (int j = 0; j < m; ++j) {
        double face = 0.0;
        int count = 0;
        if (ap >= 0) face += fa(ap, j), ++count;
        if (aq >= 0) face += fa(aq, j), ++count;
        if (count == 0) continue;
        face /= count;
        const double c = w * mesh.mass[j] * face / h;
        if (ap >= 0) rhs[j * n + ap] -= c;
        if (aq >= 0) rhs[j * n + aq] += c;
      }
    }
  }
}

}  // namespace

ExtensionField solve_extension_forced(const DiscreteOperator& op, const ForcingData& data, const ExtensionMesh& mesh) {
  check_mesh(op, mesh);
  const int n = op.size(), m = mesh.layers();
  const SparseMatrix a = cylinder_matrix(op, mesh, 0);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a.rows());
  if (data.flux.size() > 0) {
    if (!(data.flux.grid == op.grid())) throw Error("solve_extension_forced: f lives on a different grid");
    rhs.head(n) += op.weight() * op.restrict(data.flux);
  }
  add_forcing(op, mesh, data, rhs);
  ExtensionField f{mesh, op, Eigen::MatrixXd::Zero(n, m + 1)};
  if (rhs.cwiseAbs().maxCoeff() == 0.0) return f;
  const Eigen::VectorXd x = solve_spd(a, rhs, op.grid().dim(), f.iterations, f.solver_residual);
  for (int j = 0; j < m; ++j) f.values.col(j) = x.segment(j * n, n);
  return f;
}

DtnResult dtn_extract(const ExtensionField& field, int fit_layers) {
  const ExtensionMesh& mesh = field.mesh;
  if (fit_layers < 2 || fit_layers >= mesh.layers()) throw Error("dtn_extract: invalid number of fit layers");
  const double two_s = 2.0 * mesh.s;
  Eigen::MatrixXd design(fit_layers, 2);
  for (int j = 1; j <= fit_layers; ++j) {
    design(j - 1, 0) = std::pow(mesh.y[j], two_s);
    design(j - 1, 1) = mesh.y[j] * mesh.y[j];
  }
  // Column scaling keeps the normal equations well conditioned.
  const Eigen::Vector2d scale(1.0 / design.col(0).norm(), 1.0 / design.col(1).norm());
  const Eigen::MatrixXd scaled = design * scale.asDiagonal();
  const auto qr = scaled.colPivHouseholderQr();

  const int n = field.op.size();
  const double trace_scale = std::max(field.values.col(0).cwiseAbs().maxCoeff(), 1e-300);
  Eigen::VectorXd beta(n);
  DtnResult r;
  r.residual.resize(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd d(fit_layers);
    for (int j = 1; j <= fit_layers; ++j) d[j - 1] = field.values(i, j) - field.values(i, 0);
    const Eigen::Vector2d c = qr.solve(d);
    beta[i] = c[0] * scale[0];
    r.residual[i] = (scaled * c - d).norm() / std::sqrt(double(fit_layers)) / trace_scale;
  }
  r.max_residual = r.residual.maxCoeff();
  r.value = field.op.extend(-beta / quotient_constant(mesh.s));
  return r;
}

GridFunction dtn_flux(const ExtensionField& field) {
  const ExtensionMesh& mesh = field.mesh;
  const Eigen::VectorXd u = field.values.col(0);
  Eigen::VectorXd flux = mesh.mass[0] * (field.op.matrix() * u) + mesh.stiffness[0] * (u - field.values.col(1));
  return field.op.extend(flux / dtn_constant(mesh.s));
}

double extension_energy(const ExtensionField& field) {
  const ExtensionMesh& mesh = field.mesh;
  const SparseMatrix& lap = field.op.matrix();
  double e = 0.0;
  for (int j = 0; j <= mesh.layers(); ++j) {
    const Eigen::VectorXd col = field.values.col(j);
    e += mesh.mass[j] * col.dot(lap * col);
  }
  for (int c = 0; c < mesh.layers(); ++c)
    e += mesh.stiffness[c] * (field.values.col(c + 1) - field.values.col(c)).squaredNorm();
  return e * field.op.weight();
}

GridFunction extension_bessel_eval(const EigenBasis& basis, const GridFunction& u, double s, double y) {
  if (y < 0.0) throw Error("extension_bessel_eval: y must be nonnegative");
  if (!(s > 0.0 && s < 1.0)) throw Error("extension_bessel_eval: s must lie in (0,1)");
  return basis.apply_multiplier(u, [s, y](double lam) { return extension_profile(s, std::sqrt(lam) * y); });
}

GridFunction extension_poisson_eval(const EigenBasis& basis, const GridFunction& u, double s, double y,
                                    const SingularQuadrature& q) {
  if (!(y > 0.0)) throw Error("extension_poisson_eval: y must be positive");
  return basis.apply_multiplier(u, [&](double lam) { return poisson_scalar(lam, s, y, q); });
}

namespace {

// Cell-wise quadrature over the cylinder: each base cell times each layer cell.
struct CylinderCell {
  Point centre;
  double y = 0.0;
  double weight = 0.0;  // int_cell y^a dX
  double value = 0.0;
  std::array<double, 3> grad{0.0, 0.0, 0.0};  // x0, x1 (2D base), y
  std::array<double, 2> forcing{0.0, 0.0};
};

template <class Visit>
void visit_cells(const ExtensionField& field, const ForcingData* data, Visit visit) {
  const Grid& g = field.op.grid();
  const ExtensionMesh& mesh = field.mesh;
  const int dim = g.dim();
  const int nx = g.nodes(0), ny = dim == 2 ? g.nodes(1) : 2;
  const double hx = g.spacing(0), hy = dim == 2 ? g.spacing(1) : 1.0;
  const double area = dim == 2 ? hx * hy : hx;
  auto nodal = [&](int flat, int layer) {
    const int k = field.op.active_index(flat);
    return k < 0 ? 0.0 : field.values(k, layer);
  };
  auto force = [&](int axis, int flat, int layer) {
    const int k = field.op.active_index(flat);
    return k < 0 || data == nullptr || data->field.empty() ? 0.0 : data->field[axis](k, layer);
  };
  for (int cj = 0; cj + 1 < ny; ++cj)
    for (int ci = 0; ci + 1 < nx; ++ci) {
      std::vector<int> corners = {g.flat(ci, cj), g.flat(ci + 1, cj)};
      if (dim == 2) corners = {g.flat(ci, cj), g.flat(ci + 1, cj), g.flat(ci, cj + 1), g.flat(ci + 1, cj + 1)};
      const double nc = static_cast<double>(corners.size());
      Point centre{g.coord(corners[0], 0) + 0.5 * hx, dim == 2 ? g.coord(corners[0], 1) + 0.5 * hy : 0.0};
      for (int l = 0; l < mesh.layers(); ++l) {
        CylinderCell c;
        c.centre = centre;
        c.y = 0.5 * (mesh.y[l] + mesh.y[l + 1]);
        c.weight = mesh.cell_weight[l] * area;
        const double dy = mesh.y[l + 1] - mesh.y[l];
        double gx = 0.0, gy1 = 0.0, gz = 0.0;
        for (int lay : {l, l + 1}) {
          for (int k = 0; k < static_cast<int>(corners.size()); ++k) {
            const double v = nodal(corners[k], lay);
            c.value += v / (2.0 * nc);
            gz += (lay == l ? -v : v) / (nc * dy);
            gx += ((k % 2) ? v : -v) / (2.0 * (nc / 2.0) * hx);
            if (dim == 2) gy1 += ((k / 2) ? v : -v) / (2.0 * (nc / 2.0) * hy);
            for (int axis = 0; axis < dim; ++axis) c.forcing[axis] += force(axis, corners[k], lay) / (2.0 * nc);
          }
        }
        c.grad = {gx, gy1, gz};
        visit(c);
      }
    }
}

}  // namespace

CaccioppoliReport caccioppoli_check(const ExtensionField& field, const ForcingData& data, const Point& x0, double r) {
  if (!(r > 0.0)) throw Error("caccioppoli_check: radius must be positive");
  const int dim = field.op.grid().dim();
  CaccioppoliReport rep;
  visit_cells(field, &data, [&](const CylinderCell& c) {
    double d2 = c.y * c.y;
    for (int a = 0; a < dim; ++a) d2 += (c.centre[a] - x0[a]) * (c.centre[a] - x0[a]);
    const double q = 1.0 - d2 / (r * r);
    if (q <= 0.0) return;
    const double eta = q * q;
    // grad eta = -4 q (X - X0) / r^2
    const double grad_eta2 = 16.0 * q * q * d2 / (r * r * r * r);
    const double g2 = c.grad[0] * c.grad[0] + c.grad[1] * c.grad[1] + c.grad[2] * c.grad[2];
    const double f2 = c.forcing[0] * c.forcing[0] + c.forcing[1] * c.forcing[1];
    rep.lhs += c.weight * eta * eta * g2;
    rep.gradient_term += c.weight * grad_eta2 * c.value * c.value;
    rep.forcing_term += c.weight * f2 * eta * eta;
  });
  if (data.flux.size() > 0) {
    const Grid& g = field.op.grid();
    const GridFunction tr = field.trace();
    for (int p = 0; p < g.size(); ++p) {
      double d2 = 0.0;
      for (int a = 0; a < dim; ++a) d2 += (g.coord(p, a) - x0[a]) * (g.coord(p, a) - x0[a]);
      const double q = 1.0 - d2 / (r * r);
      if (q <= 0.0) continue;
      rep.flux_term += g.cell_volume() * q * q * q * q * std::abs(tr.values[p]) * std::abs(data.flux.values[p]);
    }
  }
  const double rhs = rep.gradient_term + rep.forcing_term + rep.flux_term;
  rep.ratio = rhs > 0.0 ? rep.lhs / rhs : 0.0;
  return rep;
}

TraceReport trace_inequality_check(const ExtensionField& field, const Point& x0, const std::vector<double>& radii) {
  const Grid& g = field.op.grid();
  const int dim = g.dim();
  const GridFunction tr = field.trace();
  TraceReport rep;
  for (double r : radii) {
    if (!(r > 0.0)) throw Error("trace_inequality_check: radii must be positive");
    double trace2 = 0.0;
    for (int p = 0; p < g.size(); ++p) {
      double d2 = 0.0;
      for (int a = 0; a < dim; ++a) d2 += (g.coord(p, a) - x0[a]) * (g.coord(p, a) - x0[a]);
      if (d2 < r * r) trace2 += g.cell_volume() * tr.values[p] * tr.values[p];
    }
    double h1 = 0.0;
    visit_cells(field, nullptr, [&](const CylinderCell& c) {
      double d2 = c.y * c.y;
      for (int a = 0; a < dim; ++a) d2 += (c.centre[a] - x0[a]) * (c.centre[a] - x0[a]);
      if (d2 >= r * r) return;
      h1 += c.weight * (c.value * c.value + c.grad[0] * c.grad[0] + c.grad[1] * c.grad[1] + c.grad[2] * c.grad[2]);
    });
    const double ratio = h1 > 0.0 ? std::pow(r, 1.0 - field.mesh.s) * std::sqrt(trace2) / std::sqrt(h1) : 0.0;
    rep.radii.push_back(r);
    rep.ratios.push_back(ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  return rep;
}

}  // namespace fracell
