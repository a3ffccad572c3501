#pragma once

#include <vector>

#include <Eigen/Core>

#include "fracell/quadrature.hpp"
#include "fracell/spectral.hpp"

namespace fracell {

/// Graded vertical mesh y_j = Y (j/M)^gamma over a base grid, with the
/// weight y^a (a = 1 - 2s) integrated exactly on every cell.
///
/// mass[j] is the lumped weight int y^a psi_j dy of the hat function at y_j.
/// stiffness[c] is the harmonic cell weight 1 / int_{cell} y^{-a} dy, which
/// makes the one-dimensional profile A + B y^{2s} exact on any mesh.
struct ExtensionMesh {
  Grid base;
  double s = 0.5;
  double a = 0.0;
  double height = 1.0;
  double gamma = 2.0;
  std::vector<double> y;
  std::vector<double> mass;
  std::vector<double> stiffness;
  /// int_{cell} y^a dy, used by the energy and inequality integrals.
  std::vector<double> cell_weight;

  int layers() const { return static_cast<int>(y.size()) - 1; }

  /// gamma <= 0 selects the default max(3, 1/s).
  static ExtensionMesh graded(const Grid& base, double s, double height, int layers, double gamma = 0.0);
};

/// Smallest Y with extension_profile(s, sqrt(lambda) Y) <= tol.
double truncation_height(double s, double lambda, double tol = 1e-8);

/// Extension solution on active base nodes x all layers; column j is y_j.
struct ExtensionField {
  ExtensionMesh mesh;
  DiscreteOperator op;
  Eigen::MatrixXd values;
  int iterations = 0;
  double solver_residual = 0.0;

  GridFunction layer(int j) const { return op.extend(values.col(j)); }
  GridFunction trace() const { return layer(0); }
};

/// Weighted solve of div(y^a B grad U) = 0 with U(.,0) = u, U(.,Y) = 0 and the
/// lateral condition of `op`.
ExtensionField solve_extension(const DiscreteOperator& op, const GridFunction& u, const ExtensionMesh& mesh);

/// Horizontal forcing field F (last component zero): one matrix per axis of
/// the base, active nodes x layers.
struct ForcingData {
  std::vector<Eigen::MatrixXd> field;
  GridFunction flux;
};

/// div(y^a B grad U) = div(y^a F), -y^a U_y = f at y = 0, U(.,Y) = 0, lateral
/// condition of `op`. The trace is free.
ExtensionField solve_extension_forced(const DiscreteOperator& op, const ForcingData& data, const ExtensionMesh& mesh);

struct DtnResult {
  /// Estimate of L^s u.
  GridFunction value;
  /// Per-node rms residual of the fit, relative to the trace scale.
  Eigen::VectorXd residual;
  double max_residual = 0.0;
};

/// L^s u from the incremental quotient: U(x,y) - U(x,0) ~ beta y^{2s} + delta y^2
/// fitted on the first `fit_layers` layers, L^s u = -beta / quotient_constant(s).
DtnResult dtn_extract(const ExtensionField& field, int fit_layers = 3);

/// L^s u from the discrete conormal flux at y = 0 divided by dtn_constant(s).
GridFunction dtn_flux(const ExtensionField& field);

/// Weighted energy int y^a B grad U . grad U of the discrete field.
double extension_energy(const ExtensionField& field);

/// Bessel series sum u_k profile(s, sqrt(lambda_k) y) phi_k.
GridFunction extension_bessel_eval(const EigenBasis& basis, const GridFunction& u, double s, double y);

/// Same field from the Poisson-kernel t-integral, mode by mode.
GridFunction extension_poisson_eval(const EigenBasis& basis, const GridFunction& u, double s, double y,
                                    const SingularQuadrature& q);

struct CaccioppoliReport {
  double lhs = 0.0;
  double gradient_term = 0.0;
  double forcing_term = 0.0;
  double flux_term = 0.0;
  double ratio = 0.0;
};

/// Both sides of the Caccioppoli inequality with the cutoff
/// eta = (1 - |X - X0|^2 / r^2)_+^2 centred at (x0, 0).
CaccioppoliReport caccioppoli_check(const ExtensionField& field, const ForcingData& data, const Point& x0, double r);

struct TraceReport {
  std::vector<double> radii;
  std::vector<double> ratios;
  double max_ratio = 0.0;
};

/// r^{1-s} ||U(.,0)||_{L2(B_r)} / ||U||_{H1(B_r^+, y^a)} for each radius.
TraceReport trace_inequality_check(const ExtensionField& field, const Point& x0, const std::vector<double>& radii);

}  // namespace fracell
