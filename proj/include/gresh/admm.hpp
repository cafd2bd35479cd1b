#pragma once

#include <optional>

#include "gresh/solver.hpp"

namespace gresh {

struct AdmmOptions {
  double rho = 1.0;
  double tol = 1e-5;
  int max_iters = 20000;
  /// Relative residual target of the inner conjugate-gradient solves used
  /// when p exceeds kMaterializeLimit.
  double cg_tol = 1e-10;
  int cg_max_iters = 500;
  bool record_trace = false;
  int threads = 1;
};

/// Iterates of the consensus splitting, all (p+1) x p.
struct AdmmState {
  MatrixXd omega, gamma, upsilon, l1, l2;
  double b0 = 0.0;
  double rho = 1.0;
  int iterations = 0;
};

/// ADMM baseline for squared loss. The returned coefficients are Gamma with
/// the column groups that Upsilon zeroed out set to exactly zero.
/// `converged` is false when max_iters was reached.
FitResult admm_fit(const QuadraticDesign& design, const VectorXd& y, const PenaltySpec& pen,
                   const AdmmOptions& opts = {},
                   const std::optional<CoefMatrix>& warm_start = std::nullopt,
                   AdmmState* final_state = nullptr);

}  // namespace gresh
