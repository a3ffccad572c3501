#include "fracell/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fracell/grid.hpp"

namespace fracell {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

// Taylor coefficients of 1/Gamma(1+x).
constexpr double kC1 = 0.5772156649015329;
constexpr double kC2 = -0.6558780715202538;
constexpr double kC3 = -0.0420026350340952;
constexpr double kC4 = 0.1665386113822915;
constexpr double kC5 = -0.0421977345555443;

struct GammaTerms {
  double gam1;    // (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
  double gam2;    // (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
  double gampl;   // 1/Gamma(1+mu)
  double gammi;   // 1/Gamma(1-mu)
};

GammaTerms gamma_terms(double mu) {
  GammaTerms g{};
  g.gampl = 1.0 / std::tgamma(1.0 + mu);
  g.gammi = 1.0 / std::tgamma(1.0 - mu);
  if (std::abs(mu) < 1e-3) {
    const double m2 = mu * mu;
    g.gam1 = -(kC1 + kC3 * m2 + kC5 * m2 * m2);
    g.gam2 = 1.0 + kC2 * m2 + kC4 * m2 * m2;
  } else {
    g.gam1 = (g.gammi - g.gampl) / (2.0 * mu);
    g.gam2 = 0.5 * (g.gammi + g.gampl);
  }
  return g;
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, optionally scaled by exp(x).
void bessel_k_pair(double mu, double x, bool scaled, double& kmu, double& kmu1) {
  if (x <= 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = std::numbers::pi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    const GammaTerms g = gamma_terms(mu);
    double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / g.gampl;
    double q = 0.5 / (e * g.gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu * mu);
      c *= d / i;
      p /= (i - mu);
      q /= (i + mu);
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) throw std::runtime_error("bessel_k: series failed to converge");
    const double s = scaled ? std::exp(x) : 1.0;
    kmu = sum * s;
    kmu1 = sum1 * (2.0 / x) * s;
    return;
  }
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  int i = 1;
  for (; i <= kMaxIter; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > kMaxIter) throw std::runtime_error("bessel_k: continued fraction failed to converge");
  h = a1 * h;
  kmu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  if (!scaled) kmu *= std::exp(-x);
  kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

double bessel_k_impl(double nu, double x, bool scaled) {
  if (!(x > 0.0) || !std::isfinite(x)) throw Error("bessel_k: argument must be positive and finite");
  if (!(nu >= 0.0 && nu < 1.0)) throw Error("bessel_k: order must lie in [0,1)");
  double kmu = 0.0, kmu1 = 0.0;
  if (nu <= 0.5) {
    bessel_k_pair(nu, x, scaled, kmu, kmu1);
    return kmu;
  }
  bessel_k_pair(nu - 1.0, x, scaled, kmu, kmu1);
  return kmu1;
}

}  // namespace

double bessel_k(double nu, double x) {
  double v = bessel_k_impl(nu, x, false);
  if (v == 0.0 || !std::isnormal(v)) throw std::range_error("bessel_k: result underflows");
  return v;
}

double bessel_k_scaled(double nu, double x) { return bessel_k_impl(nu, x, true); }

double extension_profile(double s, double z) {
  if (z < 0.0) throw Error("extension_profile: negative argument");
  if (z == 0.0) return 1.0;
  const double pre = std::pow(2.0, 1.0 - s) / std::tgamma(s);
  // Scaled form avoids underflow of K_s for large z.
  return pre * std::exp(s * std::log(z) - z) * bessel_k_scaled(s, z);
}

double dtn_constant(double s) { return std::tgamma(1.0 - s) / (std::pow(4.0, s - 0.5) * std::tgamma(s)); }

double quotient_constant(double s) { return std::abs(std::tgamma(-s)) / (std::pow(4.0, s) * std::tgamma(s)); }

double fractional_laplacian_constant(int n, double s) {
  return std::pow(4.0, s) * std::tgamma(0.5 * n + s) /
         (std::pow(std::numbers::pi, 0.5 * n) * std::abs(std::tgamma(-s)));
}

double riesz_potential_constant(int n, double s) {
  return std::tgamma(0.5 * n - s) / (std::pow(4.0, s) * std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(s));
}

}  // namespace fracell
