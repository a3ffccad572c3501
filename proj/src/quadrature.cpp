#include "fracell/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "fracell/grid.hpp"
#include "fracell/special.hpp"

namespace fracell {

SingularQuadrature::SingularQuadrature(double power, double t_min, double t_max, double step)
    : power_(power), step_(step) {
  if (!(t_min > 0.0) || !(t_max > t_min)) throw Error("quadrature: need 0 < t_min < t_max");
  if (!(step > 0.0)) throw Error("quadrature: step must be positive");
  const double tau_min = std::log(t_min);
  const int count = static_cast<int>(std::ceil((std::log(t_max) - tau_min) / step)) + 1;
  nodes_.resize(count);
  weights_.resize(count);
  for (int j = 0; j < count; ++j) {
    const double tau = tau_min + j * step;
    nodes_[j] = std::exp(tau);
    weights_[j] = step * std::exp(-power * tau);
  }
  t_min_ = nodes_.front();
  t_max_ = nodes_.back();
  if (power > 0.0) {
    const double r = std::exp(-power * step);
    tail_weight_ = weights_.back() * r / (1.0 - r);
  } else {
    tail_weight_ = std::numeric_limits<double>::infinity();
  }
}

double SingularQuadrature::difference_integral(double lambda) const {
  if (!(power_ > 0.0)) throw Error("quadrature: difference integral needs a positive power");
  double acc = 0.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j) acc += weights_[j] * std::expm1(-nodes_[j] * lambda);
  return acc - tail_weight_;
}

double balakrishnan_scalar(double lambda, double s, const SingularQuadrature& q) {
  return q.difference_integral(lambda) / std::tgamma(-s);
}

double inverse_power_scalar(double lambda, double s, const SingularQuadrature& q) {
  return q.integrate([lambda](double t) { return std::exp(-t * lambda); }) / std::tgamma(s);
}

double poisson_scalar(double lambda, double s, double y, const SingularQuadrature& q) {
  const double y2 = 0.25 * y * y;
  const double integral =
      q.integrate([lambda, y2](double t) { return std::exp(-y2 / t - t * lambda); }, lambda == 0.0 ? 1.0 : 0.0);
  return std::pow(y, 2.0 * s) / (std::pow(4.0, s) * std::tgamma(s)) * integral;
}

namespace {

std::vector<double> probe_set(double lo, double hi) {
  std::vector<double> p;
  const int n = 41;
  for (int k = 0; k < n; ++k) p.push_back(lo * std::pow(hi / lo, k / double(n - 1)));
  p.back() = hi;
  return p;
}

template <class Make, class Residual>
QuadratureCalibration refine(Make make, Residual residual, const std::vector<double>& probes, double tol) {
  QuadratureCalibration cal;
  double step = 0.5;
  for (int r = 0; r <= 8; ++r, step *= 0.5) {
    cal.rule = make(step);
    cal.refinements = r;
    cal.max_residual = 0.0;
    for (double lam : probes) cal.max_residual = std::max(cal.max_residual, residual(cal.rule, lam));
    cal.residual_at_min = residual(cal.rule, probes.front());
    cal.residual_at_max = residual(cal.rule, probes.back());
    if (cal.max_residual <= tol) break;
  }
  return cal;
}

void check_spectrum(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo)) throw Error("quadrature calibration: need 0 < lambda_min <= lambda_max");
}

}  // namespace

QuadratureCalibration calibrate_balakrishnan(double s, double lambda_min, double lambda_max, double tol) {
  check_spectrum(lambda_min, lambda_max);
  if (!(s > 0.0 && s < 1.0)) throw Error("quadrature calibration: s must lie in (0,1)");
  const double t_min = std::pow(0.01 * tol * (1.0 - s) * std::abs(std::tgamma(-s)), 1.0 / (1.0 - s)) / lambda_max;
  const double t_max = 37.0 / lambda_min;
  auto make = [=](double step) { return SingularQuadrature(s, t_min, t_max, step); };
  auto residual = [s](const SingularQuadrature& q, double lam) {
    double exact = std::pow(lam, s);
    return std::abs(balakrishnan_scalar(lam, s, q) - exact) / exact;
  };
  return refine(make, residual, probe_set(lambda_min, lambda_max), tol);
}

QuadratureCalibration calibrate_inverse(double s, double lambda_min, double lambda_max, double tol) {
  check_spectrum(lambda_min, lambda_max);
  if (!(s > 0.0 && s < 1.0)) throw Error("quadrature calibration: s must lie in (0,1)");
  const double t_min = std::pow(0.01 * tol * s * std::tgamma(s), 1.0 / s) / lambda_max;
  const double t_max = 40.0 / lambda_min;
  auto make = [=](double step) { return SingularQuadrature(-s, t_min, t_max, step); };
  auto residual = [s](const SingularQuadrature& q, double lam) {
    double exact = std::pow(lam, -s);
    return std::abs(inverse_power_scalar(lam, s, q) - exact) / exact;
  };
  return refine(make, residual, probe_set(lambda_min, lambda_max), tol);
}

QuadratureCalibration calibrate_poisson(double s, double y, double lambda_min_positive, double lambda_max,
                                        double tol) {
  check_spectrum(lambda_min_positive, lambda_max);
  if (!(y > 0.0)) throw Error("quadrature calibration: y must be positive");
  const double t_min = 0.25 * y * y / 80.0;
  const double t_max = std::max(40.0 / lambda_min_positive, 25.0 * y * y / tol);
  auto make = [=](double step) { return SingularQuadrature(s, t_min, t_max, step); };
  auto residual = [s, y](const SingularQuadrature& q, double lam) {
    return std::abs(poisson_scalar(lam, s, y, q) - extension_profile(s, std::sqrt(lam) * y));
  };
  std::vector<double> probes = probe_set(lambda_min_positive, lambda_max);
  probes.insert(probes.begin(), 0.0);
  auto cal = refine(make, residual, probes, tol);
  return cal;
}

}  // namespace fracell
