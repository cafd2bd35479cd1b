#include "gresh/kernels.hpp"

#include <algorithm>
#include <cstdlib>

#include <omp.h>

namespace gresh::kernels {

namespace {

constexpr Eigen::Index kRowBlock = 64;
constexpr Eigen::Index kColBlock = 16;

Eigen::Index num_blocks(Eigen::Index total, Eigen::Index block) {
  return (total + block - 1) / block;
}

}  // namespace

int resolve_threads(int requested) {
  if (requested >= 1) return requested;
  if (const char* env = std::getenv("GRESH_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1, omp_get_max_threads());
}

void row_quadratic_forms_serial(const MatrixXd& z, const MatrixXd& phi, Eigen::Ref<VectorXd> out) {
  const Eigen::Index n = z.rows(), p = z.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) {
      double inner = 0.0;
      for (Eigen::Index j = 0; j < p; ++j) inner += z(i, j) * phi(j, k);
      acc += inner * z(i, k);
    }
    out[i] = acc;
  }
}

void row_quadratic_forms(const MatrixXd& z, const MatrixXd& phi, Eigen::Ref<VectorXd> out,
                         int threads) {
  const Eigen::Index n = z.rows();
  const Eigen::Index blocks = num_blocks(n, kRowBlock);
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && blocks > 1)
  for (Eigen::Index blk = 0; blk < blocks; ++blk) {
    const Eigen::Index r0 = blk * kRowBlock;
    const Eigen::Index rows = std::min(kRowBlock, n - r0);
    const MatrixXd t = z.middleRows(r0, rows) * phi;
    out.segment(r0, rows) = (t.array() * z.middleRows(r0, rows).array()).rowwise().sum();
  }
}

MatrixXd weighted_gram_serial(const MatrixXd& z, const VectorXd& r) {
  const Eigen::Index n = z.rows(), p = z.cols();
  MatrixXd g(p, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    for (Eigen::Index j = 0; j <= k; ++j) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) acc += z(i, j) * r[i] * z(i, k);
      g(j, k) = acc;
      g(k, j) = acc;
    }
  }
  return g;
}

MatrixXd weighted_gram(const MatrixXd& z, const VectorXd& r, int threads) {
  const Eigen::Index p = z.cols();
  const MatrixXd rz = r.asDiagonal() * z;
  MatrixXd g(p, p);
  const Eigen::Index blocks = num_blocks(p, kColBlock);
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && blocks > 1)
  for (Eigen::Index blk = 0; blk < blocks; ++blk) {
    const Eigen::Index c0 = blk * kColBlock;
    const Eigen::Index cols = std::min(kColBlock, p - c0);
    g.middleCols(c0, cols).noalias() = z.transpose() * rz.middleCols(c0, cols);
  }
  // Mirror the upper triangle so the result is exactly symmetric.
  for (Eigen::Index k = 0; k < p; ++k)
    for (Eigen::Index j = k + 1; j < p; ++j) g(j, k) = g(k, j);
  return g;
}

VectorXd transpose_times_serial(const MatrixXd& x, const VectorXd& r) {
  VectorXd out(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) acc += x(i, j) * r[i];
    out[j] = acc;
  }
  return out;
}

VectorXd transpose_times(const MatrixXd& x, const VectorXd& r, int threads) {
  const Eigen::Index p = x.cols();
  VectorXd out(p);
  const Eigen::Index blocks = num_blocks(p, kColBlock);
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && blocks > 1)
  for (Eigen::Index blk = 0; blk < blocks; ++blk) {
    const Eigen::Index c0 = blk * kColBlock;
    const Eigen::Index cols = std::min(kColBlock, p - c0);
    out.segment(c0, cols).noalias() = x.middleCols(c0, cols).transpose() * r;
  }
  return out;
}

}  // namespace gresh::kernels
