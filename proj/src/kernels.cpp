#include "fracell/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fracell::kernels {

Eigen::MatrixXd spectral_sum(const Eigen::MatrixXd& phi, const Eigen::VectorXd& c) {
  const Eigen::Index n = phi.rows();
  const Eigen::MatrixXd pt = phi.transpose();
  const Eigen::MatrixXd bt = c.asDiagonal() * pt;
  Eigen::MatrixXd k(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = bt.col(i).dot(pt.col(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

double pair_form(const Eigen::VectorXd& u, const Eigen::VectorXd& psi, const Eigen::MatrixXd& k) {
  const Eigen::Index n = u.size();
  double total = 0.0;
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      col += (u[i] - u[j]) * (psi[i] - psi[j]) * k(i, j);
    }
    total += col;
  }
  return total;
}

double asymmetry(const Eigen::MatrixXd& k) {
  const double scale = k.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (k - k.transpose()).cwiseAbs().maxCoeff() / scale;
}

namespace serial {

Eigen::MatrixXd spectral_sum(const Eigen::MatrixXd& phi, const Eigen::VectorXd& c) {
  const Eigen::Index n = phi.rows(), m = phi.cols();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Eigen::Index q = 0; q < m; ++q) acc += phi(i, q) * c[q] * phi(j, q);
      k(i, j) = acc;
    }
  return k;
}

double pair_form(const Eigen::VectorXd& u, const Eigen::VectorXd& psi, const Eigen::MatrixXd& k) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    for (Eigen::Index j = 0; j < u.size(); ++j)
      if (i != j) total += (u[i] - u[j]) * (psi[i] - psi[j]) * k(i, j);
  return total;
}

}  // namespace serial

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace fracell::kernels
