#pragma once

#include <vector>

#include <Eigen/Core>

namespace fracell {

/// Least-squares line y = slope * x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
  int points = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares solution of design * coef = y with rmse of the residual.
struct LinearFit {
  Eigen::VectorXd coef;
  double rmse = 0.0;
};

LinearFit fit_linear(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

/// Observed order from errors on successively halved meshes: log2(e_k / e_{k+1}).
std::vector<double> observed_orders(const std::vector<double>& errors);

}  // namespace fracell
