#pragma once

#include <Eigen/Dense>

// Dense inner loops of the quadratic design. Each kernel has a plain serial
// reference (kept for tests and the benchmark) and a blocked OpenMP version.
// The blocked versions partition the output into fixed-size blocks that do
// not depend on the thread count, and every output entry is reduced by a
// single thread, so results are bitwise identical for any `threads`.
namespace gresh::kernels {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// out_i = z_i^T Phi z_i for every row z_i of Z.
void row_quadratic_forms_serial(const MatrixXd& z, const MatrixXd& phi, Eigen::Ref<VectorXd> out);
void row_quadratic_forms(const MatrixXd& z, const MatrixXd& phi, Eigen::Ref<VectorXd> out,
                         int threads = 1);

/// Z^T diag(r) Z, returned exactly symmetric.
MatrixXd weighted_gram_serial(const MatrixXd& z, const VectorXd& r);
MatrixXd weighted_gram(const MatrixXd& z, const VectorXd& r, int threads = 1);

/// X^T r.
VectorXd transpose_times_serial(const MatrixXd& x, const VectorXd& r);
VectorXd transpose_times(const MatrixXd& x, const VectorXd& r, int threads = 1);

/// Resolves a requested thread count: values < 1 mean "use GRESH_THREADS or
/// the OpenMP default".
int resolve_threads(int requested);

}  // namespace gresh::kernels
