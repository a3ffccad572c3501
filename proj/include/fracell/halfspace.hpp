#pragma once

#include <vector>

#include "fracell/spectral.hpp"

namespace fracell {

enum class Parity { Odd, Even };

/// Mirror image of a half-grid function across the face x_n = 0 of the last
/// axis. The symmetric grid has 2m - 1 nodes along that axis and is stored
/// on [0, 2L], so the mirror plane sits at x_n = L.
struct ReflectedFunction {
  GridFunction function;
  Parity parity = Parity::Odd;
  int axis = 0;
  /// Node count of the original half grid along `axis`.
  int half_nodes = 0;

  /// Values on the original half (mirror plane included), as a half-grid function.
  GridFunction restrict_to_half(const Grid& half) const;
};

/// Odd reflection requires u = 0 on the face x_n = 0.
ReflectedFunction reflect(const GridFunction& u, Parity parity);

/// max |v(x) -+ v(x*)| over mirrored node pairs of the symmetric grid.
double parity_defect(const GridFunction& v, Parity parity);

enum class Reflection { DirichletOdd, NeumannEven };

/// Pointwise kernel of the half-space operator,
/// c_{n,s} (|x - z|^{-(n+2s)} -+ |x - z*|^{-(n+2s)}), with the wall at x_n = 0
/// on the last coordinate. The energy kernel K_s is one half of this.
double halfspace_kernel(const Point& x, const Point& z, int n, double s, Reflection bc);

enum class HalfLineRhs { One, IndicatorUnit };

struct HalfLineProblem {
  double s = 0.25;
  HalfLineRhs rhs = HalfLineRhs::One;
  Reflection bc = Reflection::DirichletOdd;
  /// Length of the truncated half-line used by the discrete oracles.
  double truncation = 16.0;

  void validate() const;
};

/// u(x) = int_0^inf k(x, z) f(z) dz with the reflected Riesz kernel
/// |x - z|^{2s-1} -+ |x + z|^{2s-1} (log kernel ln(1/|x - z|) -+ ln(1/(x + z))
/// at s = 1/2), constant d_{1,s} set to 1. Adaptive quadrature split at z = x.
std::vector<double> halfline_inverse_quadrature(const HalfLineProblem& problem, const std::vector<double>& xs);

/// Closed forms of the same integrals (leading constant 1):
///   f = 1, odd:              x^{2s} (the integral is halfline_power_constant(s) x^{2s})
///   f = chi, odd, s != 1/2:  (2x^{2s} + (1-x)^{2s} - (1+x)^{2s}) / (2s)
///   f = chi, odd, s = 1/2:   C x + (1+x)ln(1+x) - (1-x)ln(1-x) - 2x ln x - 3 ln 3 x
///   f = chi, even:           ((1-x)^{2s} + (1+x)^{2s}) / (2s), or 2 - (1-x)ln(1-x) - (1+x)ln(1+x)
/// The indicator forms require 0 < x < 1/2 when s >= 1/2 and 0 < x < 1 otherwise.
double closed_form_halfline(const HalfLineProblem& problem, double x);

/// C = int_0^2 (ln|1+w| - ln|1-w|) dw by adaptive quadrature (analytically 3 ln 3).
double halfline_log_constant();

/// int_0^inf (|1-w|^{2s-1} - (1+w)^{2s-1}) dw for 0 < s < 1/2.
double halfline_power_constant(double s);

struct HalfLineComparison {
  std::vector<double> x;
  std::vector<double> values;
  std::vector<double> closed_form;
  std::vector<double> ratio;
  /// Least-squares constant c in values ~ c * closed_form.
  double constant = 0.0;
  /// max |values - c closed_form| / max |values|.
  double max_residual = 0.0;
  /// (max ratio - min ratio) / |mean ratio|.
  double ratio_spread = 0.0;
  /// log-log slope of |values| against x.
  double slope = 0.0;
};

HalfLineComparison compare_halfline(const HalfLineProblem& problem, const std::vector<double>& xs);

struct BoundaryGrowth {
  double exponent = 0.0;
  bool log_correction = false;
};

/// min(2s, 1), with the logarithmic correction flagged at s = 1/2.
BoundaryGrowth boundary_growth_oracle(double s);

struct ReductionReport {
  double max_deviation = 0.0;
  double solution_scale = 0.0;
};

/// Solves L^{-s} g on a 2D strip (Neumann in x_0, any condition in x_1) with
/// data g(x) = phi(x_1) and compares every column with the 1D solve on the
/// x_1 line. Throws when either solve rejects the data.
ReductionReport reduction_1d_check(const EigenBasis& strip, const EigenBasis& line,
                                   const std::function<double(double)>& phi, double s);

}  // namespace fracell
