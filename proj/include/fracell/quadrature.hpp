#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace fracell {

enum class Substitution { LogUniform };

/// Trapezoid rule in tau = log t for integrals  int_0^inf g(t) dt / t^{1+power}.
///
/// Nodes t_j = exp(tau_min + j*step), j = 0..J; weights step * t_j^{-power}.
/// For power > 0 the rule carries the geometric sum of the weights beyond
/// t_max (tail_weight), so integrands that tend to a constant g_inf at
/// infinity are summed over the infinite upper grid in closed form.
/// power = s gives dt/t^{1+s}; power = -s gives dt/t^{1-s}.
class SingularQuadrature {
 public:
  SingularQuadrature() = default;
  SingularQuadrature(double power, double t_min, double t_max, double step);

  double power() const { return power_; }
  Substitution substitution() const { return Substitution::LogUniform; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  double step() const { return step_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double tail_weight() const { return tail_weight_; }
  int size() const { return static_cast<int>(nodes_.size()); }

  template <class G>
  double integrate(G&& g, double g_inf = 0.0) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) acc += weights_[j] * g(nodes_[j]);
    if (g_inf != 0.0) acc += tail_weight_ * g_inf;
    return acc;
  }

  /// int_0^inf (exp(-t lambda) - 1) dt/t^{1+s} ~= Gamma(-s) lambda^s (power > 0 only).
  double difference_integral(double lambda) const;

 private:
  double power_ = 0.0;
  double t_min_ = 0.0;
  double t_max_ = 0.0;
  double step_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  double tail_weight_ = 0.0;
};

/// Calibration report: worst relative error of the scalar identity over a
/// log-spaced probe set spanning [lambda_min, lambda_max].
struct QuadratureCalibration {
  SingularQuadrature rule;
  double residual_at_min = 0.0;
  double residual_at_max = 0.0;
  double max_residual = 0.0;
  int refinements = 0;
};

/// Rule for lambda^s = (1/Gamma(-s)) int (e^{-t lambda} - 1) dt/t^{1+s}.
/// t_min resolves e^{-t lambda_max}; t_max makes e^{-t lambda_min} < 1e-16; the
/// step is halved until every probe meets `tol`.
QuadratureCalibration calibrate_balakrishnan(double s, double lambda_min, double lambda_max, double tol = 1e-10);

/// Rule for lambda^{-s} = (1/Gamma(s)) int e^{-t lambda} dt/t^{1-s}.
QuadratureCalibration calibrate_inverse(double s, double lambda_min, double lambda_max, double tol = 1e-10);

/// Rule for the Poisson-kernel integral at height y:
/// (y^{2s}/(4^s Gamma(s))) int e^{-y^2/(4t)} e^{-t lambda} dt/t^{1+s}, whose
/// exact value is the normalized Bessel profile. lambda_min may be 0.
QuadratureCalibration calibrate_poisson(double s, double y, double lambda_min_positive, double lambda_max,
                                        double tol = 1e-10);

/// (1/Gamma(-s)) int (e^{-t lambda} - 1) dt / t^{1+s} with the given rule.
double balakrishnan_scalar(double lambda, double s, const SingularQuadrature& q);
/// (1/Gamma(s)) int e^{-t lambda} dt / t^{1-s}.
double inverse_power_scalar(double lambda, double s, const SingularQuadrature& q);
/// (y^{2s}/(4^s Gamma(s))) int e^{-y^2/(4t)} e^{-t lambda} dt / t^{1+s}.
double poisson_scalar(double lambda, double s, double y, const SingularQuadrature& q);

}  // namespace fracell
