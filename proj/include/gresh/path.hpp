#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gresh/solver.hpp"

namespace gresh {

struct Validation {
  MatrixXd x;  // raw predictors
  VectorXd y;
};

struct PathSpec {
  int n_lambda = 20;
  double ratio_c = 0.5;           // lambda2 = c * lambda1
  double lambda_min_frac = 1e-3;  // last node = frac * lambda_max
  /// Ridge parameters as multiples of trace(A_S^T A_S) / |S|.
  std::vector<double> ridge_gamma = {1e-4, 1e-3, 1e-2, 1e-1};
  std::optional<Validation> validation;
  SolverOptions solver;
  /// Use the ADMM baseline instead of Algorithm 1 at every node.
  bool use_admm = false;
  double admm_tol = 1e-5;
};

/// Selected columns of the augmented design: main effects j, and
/// interaction pairs (j, k) with j <= k, each entered once.
struct Support {
  std::vector<Index> mains;
  std::vector<std::pair<Index, Index>> pairs;
  std::size_t size() const { return mains.size() + pairs.size(); }
  bool empty() const { return size() == 0; }
};

/// Nonzero main effects and nonzero symmetrized interaction pairs
/// (|phi_jk + phi_kj| / 2 > tol, or |phi_kk| > tol on the diagonal).
Support extract_support(const CoefMatrix& omega, double tol = 1e-8);

struct PathNode {
  double lambda1 = 0.0, lambda2 = 0.0;
  FitResult fit;
  Index support_groups = 0;  // J_G
  Index support_phi = 0;     // J_e
  CoefMatrix refit;          // raw coordinates, best ridge parameter
  double refit_gamma = 0.0;
  double validation_mse = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;
  std::string error;
};

struct PathResult {
  std::vector<PathNode> nodes;  // largest lambda1 first
  double lambda_max = 0.0;
  int selected = 0;
  double wall_time = 0.0;
};

/// Smallest lambda1 (lambda2 = c * lambda1, lambda_b = 0) for which Omega = 0
/// satisfies the zero-column subgradient conditions without symmetry
/// multipliers, which is an upper bound on the exact value. When
/// verify = true a fit at the returned value is checked to be zero, and the
/// value is enlarged until it is.
double lambda_max(const QuadraticDesign& design, const VectorXd& y, double ratio_c,
                  Hierarchy mode, GreshType type, bool verify = true,
                  const SolverOptions& opts = {});

/// Ridge fit on the selected columns of the working-scaled design with an
/// unpenalized intercept when the design has one. Returns raw coefficients.
CoefMatrix ridge_refit(const QuadraticDesign& design, const VectorXd& y, const Support& support,
                       double gamma);

/// The dense selected-column matrix used by ridge_refit (working scale).
MatrixXd support_design(const QuadraticDesign& design, const Support& support);

/// Computes the path and, when spec.validation is set, tunes it.
PathResult solution_path(const QuadraticDesign& design, const VectorXd& y, const PathSpec& spec,
                         Hierarchy mode, GreshType type);

/// Index of the node with the smallest validation MSE; ties go to the
/// larger lambda1. Nodes without a validation score are skipped.
int tune(const PathResult& path);

double mean_squared_error(const VectorXd& a, const VectorXd& b);

}  // namespace gresh
