#pragma once

namespace fracell {

/// Modified Bessel function of the second kind K_nu(x), 0 <= nu < 1, x > 0.
///
/// Temme's series for x <= 2, Steed's continued fraction above. Throws
/// std::range_error when the result underflows (x beyond ~700).
double bessel_k(double nu, double x);

/// exp(x) K_nu(x); finite for all x > 0.
double bessel_k_scaled(double nu, double x);

/// Normalized extension profile 2^{1-s}/Gamma(s) z^s K_s(z); equals 1 at z = 0
/// and decays like z^{s-1/2} e^{-z}.
double extension_profile(double s, double z);

/// Gamma(1-s) / (4^{s-1/2} Gamma(s)): -lim y^a U_y = c_s L^s u.
double dtn_constant(double s);
/// |Gamma(-s)| / (4^s Gamma(s)): -lim (U(y)-U(0))/y^{2s} = c L^s u.
double quotient_constant(double s);

/// Constant of the pointwise formula for (-Delta)^s on R^n:
/// 4^s Gamma(n/2 + s) / (pi^{n/2} |Gamma(-s)|).
double fractional_laplacian_constant(int n, double s);
/// Riesz potential constant of (-Delta)^{-s} on R^n (n != 2s):
/// Gamma(n/2 - s) / (4^s pi^{n/2} Gamma(s)).
double riesz_potential_constant(int n, double s);

}  // namespace fracell
