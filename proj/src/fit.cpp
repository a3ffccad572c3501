#include "fracell/fit.hpp"

#include <cmath>

#include <Eigen/QR>

#include "fracell/grid.hpp"

namespace fracell {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error("fit_line: length mismatch");
  if (x.size() < 2) throw Error("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error("fit_line: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.slope * x[i] - f.intercept;
    ss += r * r;
  }
  f.rmse = std::sqrt(ss / n);
  f.r2 = syy > 0.0 ? 1.0 - ss / syy : 1.0;
  f.points = static_cast<int>(x.size());
  return f;
}

LinearFit fit_linear(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  if (design.rows() != y.size()) throw Error("fit_linear: length mismatch");
  if (design.rows() < design.cols()) throw Error("fit_linear: underdetermined");
  LinearFit f;
  f.coef = design.colPivHouseholderQr().solve(y);
  f.rmse = std::sqrt((design * f.coef - y).squaredNorm() / static_cast<double>(y.size()));
  return f;
}

std::vector<double> observed_orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) out.push_back(std::log2(errors[k] / errors[k + 1]));
  return out;
}

}  // namespace fracell
