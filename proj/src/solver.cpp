#include "gresh/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace gresh {

namespace {

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double loss_from_eta(const VectorXd& eta, const VectorXd& y, Loss loss) {
  if (loss == Loss::kSquared) return 0.5 * (y - eta).squaredNorm();
  double total = 0.0;
  for (Index i = 0; i < eta.size(); ++i) total += softplus(eta[i]) - y[i] * eta[i];
  return total;
}

void check_inputs(const QuadraticDesign& design, const VectorXd& y, const PenaltySpec& pen,
                  Loss loss) {
  pen.validate();
  if (pen.p() != design.p())
    throw GreshError(ErrorCode::kDimensionMismatch, "penalty dimension does not match the design");
  if (y.size() != design.n())
    throw GreshError(ErrorCode::kDimensionMismatch, "y must have n entries");
  if (!y.allFinite()) throw GreshError(ErrorCode::kInvalidInput, "y contains non-finite entries");
  if (loss == Loss::kLogistic)
    for (Index i = 0; i < y.size(); ++i)
      if (y[i] != 0.0 && y[i] != 1.0)
        throw GreshError(ErrorCode::kInvalidInput, "logistic loss needs a binary response");
}

// Zero every column group that the group-threshold side left at zero; under
// SH the mirrored row of Phi goes too, keeping the block symmetric. A zero
// group's Dykstra correction sits on the boundary of its ball, so rounding
// can leave residues of order eps * scale; those count as zero.
void mask_zero_groups(MatrixXd& omega, const MatrixXd& group_side, Hierarchy mode, double scale) {
  const Index p = omega.cols();
  const double tol = kGroupZeroTol * (1.0 + scale);
  for (Index k = 0; k < p; ++k) {
    if (group_side.col(k).norm() > tol) continue;
    omega.col(k).setZero();
    if (mode == Hierarchy::kStrong) omega.row(1 + k).setZero();
  }
}

}  // namespace

VectorXd loss_residual(const VectorXd& eta, const VectorXd& y, Loss loss) {
  if (loss == Loss::kSquared) return y - eta;
  VectorXd r(eta.size());
  for (Index i = 0; i < eta.size(); ++i) r[i] = y[i] - sigmoid(eta[i]);
  return r;
}

double loss_value(const QuadraticDesign& design, const CoefMatrix& omega, const VectorXd& y,
                  Loss loss) {
  if (y.size() != design.n())
    throw GreshError(ErrorCode::kDimensionMismatch, "y must have n entries");
  return loss_from_eta(apply_xbreve(design, omega), y, loss);
}

double objective(const QuadraticDesign& design, const CoefMatrix& omega, const PenaltySpec& pen,
                 const VectorXd& y, Loss loss) {
  if (pen.p() != design.p())
    throw GreshError(ErrorCode::kDimensionMismatch, "penalty dimension does not match the design");
  return loss_value(design, omega, y, loss) + penalty_value(omega.omega, pen);
}

double momentum_weight(int i) { return (2.0 * i + 3.0) / (i + 3.0); }

bool hierarchy_check(const CoefMatrix& omega, Hierarchy mode, double tol) {
  const Index p = omega.p();
  for (Index k = 0; k < p; ++k) {
    for (Index j = 0; j <= k; ++j) {
      const double phi = std::abs(omega.omega(1 + j, k) + omega.omega(1 + k, j)) / 2.0;
      if (phi <= tol) continue;
      const bool bj = std::abs(omega.omega(0, j)) > tol;
      const bool bk = std::abs(omega.omega(0, k)) > tol;
      if (mode == Hierarchy::kStrong ? !(bj && bk) : !(bj || bk)) return false;
    }
  }
  return true;
}

FitResult gresh_fit(const QuadraticDesign& design, const VectorXd& y, const PenaltySpec& pen,
                    const SolverOptions& opts, const std::optional<CoefMatrix>& warm_start) {
  const auto t0 = std::chrono::steady_clock::now();
  check_inputs(design, y, pen, opts.loss);
  if (opts.outer_tol <= 0.0 || opts.max_outer < 1 || opts.inner_iters < 1 || opts.max_inner < 1)
    throw GreshError(ErrorCode::kInvalidInput, "solver tolerances and iteration caps must be positive");

  const Index p = design.p();
  const bool intercept = design.intercept();
  const double bound =
      opts.loss == Loss::kSquared ? design.tau_hat() : design.tau_hat() / 2.0;
  double tau = opts.tau;
  if (tau <= 0.0) tau = bound > 0.0 ? (1.0 + 1e-3) * bound : 1.0;
  if (!(tau > bound))
    throw GreshError(ErrorCode::kInvalidStepSize,
                     "tau = " + std::to_string(tau) + " must exceed " + std::to_string(bound));
  const double tau2 = tau * tau;
  // curvature of the loss along X-breve, used by the inner descent test
  // (tau_hat^2 for squared loss, tau_hat^2 / 4 for logistic loss)
  const double theta = -bound * bound / 2.0;

  const MatrixXd lambda_phi =
      pen.mode == Hierarchy::kStrong ? symmetrize(pen.lambda_phi) : pen.lambda_phi;

  CoefMatrix omega(p, intercept);
  omega.scaled = true;
  if (warm_start) {
    if (warm_start->omega.rows() != p + 1 || warm_start->omega.cols() != p)
      throw GreshError(ErrorCode::kDimensionMismatch, "warm start has the wrong shape");
    omega.omega = warm_start->omega;
    if (intercept) omega.b0 = warm_start->b0;
    if (pen.mode == Hierarchy::kStrong) omega.phi() = symmetrize(omega.omega.bottomRows(p));
  } else if (intercept) {
    const double ybar = y.mean();
    if (opts.loss == Loss::kSquared)
      omega.b0 = ybar;
    else if (ybar > 0.0 && ybar < 1.0)
      omega.b0 = std::log(ybar / (1.0 - ybar));
  }

  FitResult res;
  res.tau_used = tau;
  res.penalty = pen;
  res.loss = opts.loss;

  VectorXd eta = apply_xbreve(design, omega, opts.threads);
  VectorXd r = loss_residual(eta, y, opts.loss);
  double f = loss_from_eta(eta, y, opts.loss) + penalty_value(omega.omega, pen);
  if (opts.record_trace) res.objective_trace.push_back(f);

  VectorXd lb(p), lo(p);
  MatrixXd lphi(p, p);
  double last_change = std::numeric_limits<double>::infinity();
  bool polishing = false;

  for (int i = 0;; ++i) {
    const double w = (opts.accelerate && !polishing) ? momentum_weight(i) : 1.0;
    const double step = w / tau2;
    const CoefMatrix grad = apply_xbreve_adjoint(design, r, opts.threads);
    const MatrixXd xi0 = omega.omega + step * grad.omega;
    lb = pen.lambda_b * step;
    lphi = lambda_phi * step;
    lo = pen.lambda_omega * step;
    const double db0 = intercept ? step * grad.b0 : 0.0;

    DykstraSplitting split(xi0, lb, lphi, lo, pen.mode);
    const double f_old =
        0.5 * (omega.omega - xi0).squaredNorm() + 0.5 * db0 * db0 +
        penalty_value(omega.omega, lb, lphi, lo);
    const double gap_tol =
        polishing ? 1e-13 * (1.0 + xi0.norm())
                  : std::max(opts.theta_tol * (1.0 + xi0.norm()), 0.1 * last_change);
    const int cap = polishing ? 4 * opts.max_inner : opts.max_inner;
    double dsq = 0.0;
    const double fixed_tol = opts.theta_tol * (1.0 + xi0.norm());
    while (true) {
      split.sweep();
      if (!opts.adaptive_inner && !polishing) {
        if (split.sweeps() >= opts.inner_iters || split.gap() <= fixed_tol) break;
        continue;
      }
      if (split.sweeps() < opts.inner_iters) continue;
      if (split.sweeps() >= cap) break;
      dsq = (split.xi() - omega.omega).squaredNorm() + db0 * db0;
      const double f_new =
          0.5 * (split.xi() - xi0).squaredNorm() + penalty_value(split.xi(), lb, lphi, lo);
      // g(new, old) - g(old, old) = tau^2 (F(new) - F(old)); with theta <= 0
      // this certifies the Lemma-3 descent for the inexact step
      const bool descent = f_new - f_old <= theta * dsq * step / 2.0;
      if (descent && split.gap() <= gap_tol) break;
    }
    res.inner_sweeps += split.sweeps();

    const double old_norm = std::sqrt(omega.omega.squaredNorm() + omega.b0 * omega.b0);
    const MatrixXd prev = omega.omega;
    omega.omega = split.xi();
    if (polishing) mask_zero_groups(omega.omega, split.omega_group(), pen.mode, xi0.norm());
    dsq = (omega.omega - prev).squaredNorm() + db0 * db0;
    omega.b0 += db0;
    ++res.outer_iterations;

    eta = apply_xbreve(design, omega, opts.threads);
    r = loss_residual(eta, y, opts.loss);
    f = loss_from_eta(eta, y, opts.loss) + penalty_value(omega.omega, pen);
    if (opts.record_trace) res.objective_trace.push_back(f);
    if (opts.record_steps) res.step_sq.push_back(dsq);
    last_change = std::sqrt(dsq);

    if (polishing) break;
    if (last_change <= opts.outer_tol * (1.0 + old_norm)) {
      res.converged = true;
      polishing = true;
    } else if (res.outer_iterations >= opts.max_outer) {
      polishing = true;
    }
  }

  if (opts.screen_columns) {
    // A path node stopped at a loose tolerance can keep a vanishing column
    // whose main effect already sits below any sensible zero tolerance. Such
    // a column is dropped when that is a descent step.
    const double resolution = opts.outer_tol * (1.0 + omega.omega.norm());
    for (Index k = 0; k < p; ++k) {
      const double norm = omega.omega.col(k).norm();
      if (norm == 0.0 || norm > resolution) continue;
      CoefMatrix trial = omega;
      trial.omega.col(k).setZero();
      if (pen.mode == Hierarchy::kStrong) trial.omega.row(1 + k).setZero();
      const VectorXd eta_t = apply_xbreve(design, trial, opts.threads);
      const double f_t = loss_from_eta(eta_t, y, opts.loss) + penalty_value(trial.omega, pen);
      if (f_t > f) continue;
      omega = trial;
      f = f_t;
      ++res.screened_columns;
    }
    if (res.screened_columns > 0 && opts.record_trace) res.objective_trace.back() = f;
  }

  res.final_objective = f;
  res.omega_working = omega;
  res.omega_hat = design.to_raw(omega);
  res.kkt = kkt_check(design, omega, pen, y, opts.loss);
  res.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace gresh
