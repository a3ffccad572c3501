#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracell/fit.hpp"
#include "fracell/quadrature.hpp"
#include "fracell/spectral.hpp"

namespace fracell {

// Heat semigroup and the kernels built from it. All kernels are densities:
// sum_j K(i,j) * cell_volume integrates against the uniform discrete measure.

GridFunction heat_apply(const EigenBasis& basis, const GridFunction& u, double t);

enum class TimeScheme { ImplicitEuler, Trapezoidal };

/// Eigen-free march of du/dt = -L u with sparse LDLT solves.
GridFunction heat_apply_stepped(const DiscreteOperator& op, const GridFunction& u, double t, int steps,
                                TimeScheme scheme = TimeScheme::Trapezoidal);

/// (1/Gamma(-s)) int (e^{-tL}u - u) dt/t^{1+s}, evaluated mode by mode with the
/// given rule. Throws when the rule misses lambda^s by more than `tol` at
/// either end of the spectrum.
GridFunction balakrishnan_apply(const EigenBasis& basis, const GridFunction& u, double s,
                                const SingularQuadrature& q, double tol = 1e-8);

enum class KernelKind { Ks, Gs, Wt, Poisson, KsNeumann };
std::string to_string(KernelKind k);

struct KernelMatrix {
  KernelKind kind = KernelKind::Ks;
  double s = 0.0;
  /// t for Wt, y for Poisson, 0 otherwise.
  double param = 0.0;
  Grid grid;
  std::vector<int> active;
  Eigen::MatrixXd entries;

  int size() const { return static_cast<int>(active.size()); }
  double weight() const { return grid.cell_volume(); }
  double distance(int a, int b) const { return grid.distance(active[a], active[b]); }
  /// Relative asymmetry max|K - K^T| / max|K|.
  double symmetry_error() const;
  /// Smallest entry divided by the largest magnitude (diagonal excluded for Ks).
  double min_relative_entry() const;
  /// sum_j K(i,j) * cell_volume for each row.
  Eigen::VectorXd row_integrals() const;
};

struct BsFunction {
  double s = 0.0;
  Grid grid;
  std::vector<int> active;
  Eigen::VectorXd values;
};

/// Heat kernel W_t as a density.
KernelMatrix heat_kernel(const EigenBasis& basis, double t);

/// K_s(x,z) = (1/(2|Gamma(-s)|)) int W_t(x,z) dt/t^{1+s} for x != z. The
/// diagonal is singular and stored as zero. A Neumann basis yields KsNeumann.
KernelMatrix kernel_Ks(const EigenBasis& basis, double s, const SingularQuadrature& q, double tol = 1e-8);

/// B_s(x) = (1/|Gamma(-s)|) int (1 - e^{-tL}1(x)) dt/t^{1+s}.
BsFunction function_Bs(const EigenBasis& basis, double s, const SingularQuadrature& q, double tol = 1e-8);

/// sum_{x != z} (u(x)-u(z))(psi(x)-psi(z)) K(x,z) dV^2 + sum u psi B dV.
double bilinear_form(const GridFunction& u, const GridFunction& psi, const KernelMatrix& ks, const BsFunction& bs);

namespace serial {
double bilinear_form(const GridFunction& u, const GridFunction& psi, const KernelMatrix& ks, const BsFunction& bs);
}

enum class GreensRoute { Series, Quadrature };

/// Kernel of L^{-s}: sum lambda_k^{-s} phi_k(x) phi_k(z) or the t-integral
/// (1/Gamma(s)) int W_t dt/t^{1-s}. Dirichlet only.
KernelMatrix greens_function(const EigenBasis& basis, double s, GreensRoute route = GreensRoute::Series,
                             const SingularQuadrature* q = nullptr);

/// Poisson kernel (y^{2s}/(4^s Gamma(s))) int e^{-y^2/(4t)} W_t dt/t^{1+s}.
KernelMatrix poisson_kernel(const EigenBasis& basis, double s, double y, const SingularQuadrature& q);

/// Pairs used in kernel fits: both points at least `margin` from every face,
/// and min_dist <= |x - z| <= max_dist.
struct PairWindow {
  double margin = 0.0;
  double min_dist = 0.0;
  double max_dist = 1e300;
};

struct KernelFit {
  KernelKind kind = KernelKind::Ks;
  double s = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
  int pairs_used = 0;
};

/// log K vs log |x - z| over the window.
KernelFit kernel_slope_fit(const KernelMatrix& k, const PairWindow& window);
/// K vs ln(1/|x - z|) over the window (the critical case n = 2s).
KernelFit kernel_log_fit(const KernelMatrix& k, const PairWindow& window);

/// max over off-diagonal pairs of K(x,z) |x - z|^{n+2s}.
double ks_normalized_max(const KernelMatrix& ks);

/// Report of K(x,z)|x-z|^{n+2s} against min(1, phi_0(x) phi_0(z) / |x-z|^2),
/// phi_0 scaled to unit maximum, over off-diagonal pairs with |x - z| >= min_dist.
/// Gives the fitted constant (geometric mean of the ratio) and the spread max/min.
struct BoundaryShapeReport {
  double constant = 0.0;
  double spread = 0.0;
  int pairs_used = 0;
};
BoundaryShapeReport ks_boundary_shape(const KernelMatrix& ks, const EigenBasis& basis, double min_dist);

/// Smallest C with W_t(x,z) <= C exp(-|x-z|^2/(c t)) / t^{n/2} over a sweep
/// of times, for the given c. Entries below 1e-10 of the largest are round-off
/// and skipped.
struct GaussianBoundReport {
  double c = 0.0;
  double constant = 0.0;
  int samples = 0;
};
GaussianBoundReport gaussian_bound(const EigenBasis& basis, const std::vector<double>& times, double c);

}  // namespace fracell
