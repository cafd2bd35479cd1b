#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "gresh/design.hpp"
#include "gresh/prox.hpp"
#include "gresh/types.hpp"

namespace gresh {

/// Column groups whose thresholded norm is at most kGroupZeroTol * (1 + scale)
/// are set to exactly zero when a fit is finalized.
inline constexpr double kGroupZeroTol = 1e-12;

struct SolverOptions {
  /// Step parameter; <= 0 selects (1 + 1e-3) times the required bound
  /// (tau_hat for squared loss, tau_hat / 2 for logistic loss).
  double tau = 0.0;
  double outer_tol = 1e-5;
  int max_outer = 20000;
  /// Minimum number of Dykstra sweeps per outer step.
  int inner_iters = 10;
  double theta_tol = 1e-8;
  /// Keep sweeping past inner_iters until the inexact prox certifies descent
  /// (see README, "inner stopping"), capped by max_inner.
  bool adaptive_inner = true;
  int max_inner = 5000;
  bool accelerate = false;
  Loss loss = Loss::kSquared;
  bool record_trace = true;
  /// Also record ||Omega^(i+1) - Omega^(i)||_F^2 for every outer step.
  bool record_steps = false;
  /// After the final step, drop columns smaller than the stopping rule can
  /// resolve whenever that does not raise the objective.
  bool screen_columns = true;
  int threads = 1;
};

struct KktReport {
  double max_residual_b = 0.0;     // active main effects and the intercept
  double max_residual_phi = 0.0;   // active interaction entries
  double max_residual_zero = 0.0;  // zero-column subgradient excess
  bool hierarchy_ok = true;
  std::vector<Index> support_groups;                  // J_G: nonzero columns of Omega
  std::vector<std::pair<Index, Index>> support_phi;   // J_e: nonzero (j,k) entries of Phi
  double scale = 1.0;                                 // normalization used

  double max_residual() const {
    return std::max({max_residual_b, max_residual_phi, max_residual_zero});
  }
};

struct FitResult {
  CoefMatrix omega_hat;      // coefficients of the raw predictors
  CoefMatrix omega_working;  // coefficients in the solver's working coordinates
  std::vector<double> objective_trace;  // f(Omega^(0)), f(Omega^(1)), ...
  std::vector<double> step_sq;          // ||Omega^(i+1) - Omega^(i)||_F^2, when recorded
  int outer_iterations = 0;
  long inner_sweeps = 0;
  bool converged = false;
  int screened_columns = 0;  // columns dropped by the final screen
  KktReport kkt;
  double wall_time = 0.0;
  double tau_used = 0.0;
  double final_objective = 0.0;
  PenaltySpec penalty;
  Loss loss = Loss::kSquared;
};

/// Loss part of the objective in working coordinates.
double loss_value(const QuadraticDesign& design, const CoefMatrix& omega, const VectorXd& y,
                  Loss loss = Loss::kSquared);

/// Negative loss gradient with respect to the linear predictor: y - eta for
/// squared loss, y - sigmoid(eta) for logistic loss.
VectorXd loss_residual(const VectorXd& eta, const VectorXd& y, Loss loss);

/// Loss plus penalty, evaluated in working coordinates.
double objective(const QuadraticDesign& design, const CoefMatrix& omega, const PenaltySpec& pen,
                 const VectorXd& y, Loss loss = Loss::kSquared);

/// (2i + 3) / (i + 3).
double momentum_weight(int i);

/// Algorithm 1. `warm_start` is given in working coordinates.
FitResult gresh_fit(const QuadraticDesign& design, const VectorXd& y, const PenaltySpec& pen,
                    const SolverOptions& opts = {},
                    const std::optional<CoefMatrix>& warm_start = std::nullopt);

/// SH: |phi_jk + phi_kj| / 2 > tol implies |b_j| > tol and |b_k| > tol.
/// WH: it implies |b_j| > tol or |b_k| > tol.
bool hierarchy_check(const CoefMatrix& omega, Hierarchy mode, double tol = 1e-8);

/// Optimality residuals of working-coordinate coefficients, normalized by
/// the largest penalty weight. Entries with |value| <= zero_tol, and columns
/// with ||Omega_k||_2 <= zero_tol, count as zero (the same tolerance as
/// support counting).
KktReport kkt_check(const QuadraticDesign& design, const CoefMatrix& working, const PenaltySpec& pen,
                    const VectorXd& y, Loss loss = Loss::kSquared, double zero_tol = 1e-8);

}  // namespace gresh
