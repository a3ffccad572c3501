#pragma once

#include <vector>

#include "fracell/spectral.hpp"

namespace fracell {

/// Reference part removed before squaring: the ball mean (Oscillation), the
/// value at the centre node (Anchored), the least-squares affine fit (Linear),
/// or nothing (Raw).
enum class CampanatoMode { Oscillation, Anchored, Linear, Raw };

/// Ball family for Campanato-type probes. Radii are strictly decreasing.
struct CampanatoProbe {
  Point center{0.0, 0.0};
  std::vector<double> radii;
  double alpha = 0.0;
  CampanatoMode mode = CampanatoMode::Oscillation;

  /// Throws when fewer than 4 radii are given, radii do not decrease, or a
  /// ball leaves the grid.
  void validate(const Grid& grid) const;
};

/// Dyadic radii from `largest` down to 4h (h the finest spacing).
std::vector<double> dyadic_radii(const Grid& grid, double largest);

/// Mean square deviation (1/|B_r|) int_{B_r} |f - c|^2 for each radius, with c
/// the reference part selected by the mode.
std::vector<double> mean_oscillation(const GridFunction& f, const Point& center, const std::vector<double>& radii,
                                     CampanatoMode mode);

/// sup_r r^{-(n + 2 alpha)} int_{B_r} |f - c|^2, with c fixed on the smallest
/// ball: its mean (Oscillation), the centre value (Anchored) or its affine fit
/// (Linear).
double campanato_seminorm(const GridFunction& f, const CampanatoProbe& probe);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rmse = 0.0;
  /// Exponent estimate (slope / 2 for Campanato decay, slope for growth fits).
  double exponent = 0.0;
  std::vector<double> radii;
};

/// Fit of log(mean oscillation) against log r. Radii default to dyadic_radii
/// from a quarter of the smallest extent; the two smallest are always dropped.
ExponentFit interior_exponent(const GridFunction& u, const Point& x0, CampanatoMode mode,
                              std::vector<double> radii = {});

/// Growth fit log|u| against log dist along the inward normal of the face
/// through x0 normal to `axis`, over nodes with d_min <= dist <= d_max.
ExponentFit boundary_exponent(const GridFunction& u, const Point& x0, int axis, double d_min, double d_max);

/// Discrete half-line solution w = L^{-s} 1 on [0, T] (Dirichlet at both
/// ends, spacing h) at the nodes x = h, 2h, ..., count*h, from the closed-form
/// sine basis of the three-point stencil.
std::vector<double> discrete_halfline_profile(double s, double h, double truncation, int count);

/// v = u - f(x0) w with w the half-line profile placed along the inward normal
/// of the face through x0 (1D grids, face x = 0 or x = extent).
GridFunction dirichlet_layer_split(const GridFunction& u, double f_at_x0, const Point& x0, double s,
                                   double truncation = 16.0);

struct HarnackReport {
  double sup = 0.0;
  double inf = 0.0;
  double quotient = 0.0;
  bool admissible = false;
};

/// sup / inf of u = L^{-s} f over the half ball B(center, radius/2), where
/// f >= 0 vanishes on B(center, radius). Throws when f violates that; reports
/// admissible = false when u is not positive on the ball.
HarnackReport harnack_quotient(const EigenBasis& basis, const GridFunction& f, const Point& center, double radius,
                               double s);

}  // namespace fracell
