#pragma once

#include <Eigen/Core>

// Data-parallel inner loops shared by the kernel and seminorm routines. Each
// OpenMP kernel has a plain serial twin in fracell::kernels::serial used by
// the tests and the benchmark as the reference.

namespace fracell::kernels {

/// K(i,j) = sum_k phi(i,k) c_k phi(j,k); rows are assembled in parallel.
Eigen::MatrixXd spectral_sum(const Eigen::MatrixXd& phi, const Eigen::VectorXd& c);

/// sum_{i != j} (u_i - u_j)(psi_i - psi_j) K(i,j).
double pair_form(const Eigen::VectorXd& u, const Eigen::VectorXd& psi, const Eigen::MatrixXd& k);

/// max_{i,j} |K(i,j) - K(j,i)| / max |K|.
double asymmetry(const Eigen::MatrixXd& k);

namespace serial {
Eigen::MatrixXd spectral_sum(const Eigen::MatrixXd& phi, const Eigen::VectorXd& c);
double pair_form(const Eigen::VectorXd& u, const Eigen::VectorXd& psi, const Eigen::MatrixXd& k);
}  // namespace serial

/// Number of OpenMP threads in effect (1 without OpenMP).
int thread_count();
/// Caps the OpenMP team size; no-op without OpenMP.
void set_thread_count(int n);

}  // namespace fracell::kernels
