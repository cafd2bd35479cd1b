#include "gresh/admm.hpp"

#include <chrono>
#include <cmath>
#include <memory>

namespace gresh {

namespace {

// Solves (A^T A + c I) x = v for the (centered) augmented design A.
class NormalSolver {
 public:
  virtual ~NormalSolver() = default;
  virtual void solve(const VectorXd& v, VectorXd& x) = 0;
};

class DenseNormalSolver final : public NormalSolver {
 public:
  DenseNormalSolver(MatrixXd a, double c) : a_(std::move(a)), c_(c) {
    const Index n = a_.rows(), d = a_.cols();
    woodbury_ = n < d;
    if (woodbury_) {
      MatrixXd k = a_ * a_.transpose();
      k.diagonal().array() += c_;
      llt_.compute(k);
    } else {
      MatrixXd k = a_.transpose() * a_;
      k.diagonal().array() += c_;
      llt_.compute(k);
    }
    if (llt_.info() != Eigen::Success)
      throw GreshError(ErrorCode::kInvalidInput, "normal-equation factorization failed");
  }

  void solve(const VectorXd& v, VectorXd& x) override {
    if (woodbury_) {
      const VectorXd t = llt_.solve(a_ * v);
      x = (v - a_.transpose() * t) / c_;
    } else {
      x = llt_.solve(v);
    }
  }

 private:
  MatrixXd a_;
  double c_;
  bool woodbury_ = false;
  Eigen::LLT<MatrixXd> llt_;
};

// Matrix-free conjugate gradient on the implicit design, warm-started from
// the previous solution.
class CgNormalSolver final : public NormalSolver {
 public:
  CgNormalSolver(const QuadraticDesign& design, double c, double tol, int max_iters, int threads)
      : design_(design),
        c_(c),
        tol_(tol),
        max_iters_(max_iters),
        threads_(threads),
        tmp_(design.p(), false) {}

  void solve(const VectorXd& v, VectorXd& x) override {
    VectorXd r = v - apply(x);
    VectorXd d = r;
    double rr = r.squaredNorm();
    const double stop = tol_ * tol_ * v.squaredNorm();
    for (int it = 0; it < max_iters_ && rr > stop; ++it) {
      const VectorXd ad = apply(d);
      const double alpha = rr / d.dot(ad);
      x += alpha * d;
      r -= alpha * ad;
      const double rr_new = r.squaredNorm();
      d = r + (rr_new / rr) * d;
      rr = rr_new;
    }
  }

 private:
  VectorXd apply(const VectorXd& v) {
    const Index p = design_.p();
    tmp_.omega = Eigen::Map<const MatrixXd>(v.data(), p + 1, p);
    tmp_.b0 = 0.0;
    VectorXd u = apply_xbreve(design_, tmp_, threads_);
    if (design_.intercept()) u.array() -= u.mean();
    const CoefMatrix g = apply_xbreve_adjoint(design_, u, threads_);
    VectorXd out = Eigen::Map<const VectorXd>(g.omega.data(), g.omega.size());
    return out + c_ * v;
  }

  const QuadraticDesign& design_;
  double c_, tol_;
  int max_iters_, threads_;
  CoefMatrix tmp_;
};

void group_threshold_columns(const MatrixXd& in, const VectorXd& lam, MatrixXd& out) {
  for (Index k = 0; k < in.cols(); ++k) out.col(k) = group_soft_threshold(in.col(k), lam[k]);
}

}  // namespace

FitResult admm_fit(const QuadraticDesign& design, const VectorXd& y, const PenaltySpec& pen,
                   const AdmmOptions& opts, const std::optional<CoefMatrix>& warm_start,
                   AdmmState* final_state) {
  const auto t0 = std::chrono::steady_clock::now();
  pen.validate();
  const Index p = design.p(), n = design.n();
  if (pen.p() != p) throw GreshError(ErrorCode::kDimensionMismatch, "penalty does not match design");
  if (y.size() != n) throw GreshError(ErrorCode::kDimensionMismatch, "y must have n entries");
  if (!y.allFinite()) throw GreshError(ErrorCode::kInvalidInput, "y contains non-finite entries");
  if (!(opts.rho > 0.0)) throw GreshError(ErrorCode::kInvalidInput, "rho must be positive");
  if (!(opts.tol > 0.0) || opts.max_iters < 1)
    throw GreshError(ErrorCode::kInvalidInput, "tol and max_iters must be positive");

  const bool sh = pen.mode == Hierarchy::kStrong;
  const bool intercept = design.intercept();
  const double rho = opts.rho;
  const Index d = p * (p + 1);

  // The unpenalized intercept is profiled out by centering y and the design.
  const double ybar = intercept ? y.mean() : 0.0;
  const VectorXd yc = y.array() - ybar;
  VectorXd col_means = VectorXd::Zero(d);
  std::unique_ptr<NormalSolver> solver;
  VectorXd aty;
  if (p <= kMaterializeLimit) {
    MatrixXd a = design.materialize().leftCols(d);
    if (intercept) {
      col_means = a.colwise().mean().transpose();
      a.rowwise() -= col_means.transpose();
    }
    aty = a.transpose() * yc;
    solver = std::make_unique<DenseNormalSolver>(std::move(a), 2.0 * rho);
  } else {
    const CoefMatrix g = apply_xbreve_adjoint(design, yc, opts.threads);
    aty = Eigen::Map<const VectorXd>(g.omega.data(), d);
    if (intercept) {
      const CoefMatrix m = apply_xbreve_adjoint(design, VectorXd::Constant(n, 1.0 / n), opts.threads);
      col_means = Eigen::Map<const VectorXd>(m.omega.data(), d);
    }
    solver = std::make_unique<CgNormalSolver>(design, 2.0 * rho, opts.cg_tol, opts.cg_max_iters,
                                              opts.threads);
  }

  const MatrixXd lambda_phi = sh ? symmetrize(pen.lambda_phi) : pen.lambda_phi;
  MatrixXd l1_weights(p + 1, p);
  l1_weights.row(0) = pen.lambda_b.transpose() / rho;
  l1_weights.bottomRows(p) = lambda_phi / rho;
  const VectorXd group_weights = pen.lambda_omega / rho;

  AdmmState st;
  st.rho = rho;
  st.omega = MatrixXd::Zero(p + 1, p);
  if (warm_start) {
    if (warm_start->omega.rows() != p + 1 || warm_start->omega.cols() != p)
      throw GreshError(ErrorCode::kDimensionMismatch, "warm start has the wrong shape");
    st.omega = warm_start->omega;
  }
  st.gamma = st.omega;
  st.upsilon = st.omega;
  st.l1 = MatrixXd::Zero(p + 1, p);
  st.l2 = MatrixXd::Zero(p + 1, p);

  FitResult res;
  res.penalty = pen;
  res.loss = Loss::kSquared;

  VectorXd x = Eigen::Map<const VectorXd>(st.omega.data(), d);
  MatrixXd consensus_prev = st.gamma + st.upsilon;
  for (int it = 1; it <= opts.max_iters; ++it) {
    // Step 1: Omega-update
    const MatrixXd rhs_m = rho * (st.gamma + st.upsilon - st.l1 - st.l2);
    const VectorXd rhs = aty + Eigen::Map<const VectorXd>(rhs_m.data(), d);
    solver->solve(rhs, x);
    st.omega = Eigen::Map<const MatrixXd>(x.data(), p + 1, p);
    // Step 2: Upsilon-update
    group_threshold_columns(st.omega + st.l2, group_weights, st.upsilon);
    // Step 3: symmetrize Omega's Phi block
    if (sh) st.omega.bottomRows(p) = symmetrize(st.omega.bottomRows(p));
    // Step 4: Gamma-update
    const MatrixXd a = st.omega + st.l1;
    for (Index k = 0; k < p; ++k)
      for (Index j = 0; j <= p; ++j) st.gamma(j, k) = soft_threshold(a(j, k), l1_weights(j, k));
    // Steps 5-6: dual ascent
    st.l2 += st.omega - st.upsilon;
    st.l1 += st.omega - st.gamma;
    st.iterations = it;

    const MatrixXd consensus = st.gamma + st.upsilon;
    const double scale = opts.tol * (1.0 + st.omega.norm());
    const double r_gamma = (st.omega - st.gamma).norm();
    const double r_upsilon = (st.omega - st.upsilon).norm();
    const double s_dual = rho * (consensus - consensus_prev).norm();
    consensus_prev = consensus;
    if (opts.record_trace) {
      CoefMatrix cur(p, intercept);
      cur.omega = st.gamma;
      cur.b0 = ybar - col_means.dot(Eigen::Map<const VectorXd>(cur.omega.data(), d));
      res.objective_trace.push_back(objective(design, cur, pen, y));
    }
    if (r_gamma <= scale && r_upsilon <= scale && s_dual <= scale) {
      res.converged = true;
      break;
    }
  }

  CoefMatrix out(p, intercept);
  out.scaled = true;
  out.omega = st.gamma;
  const double zero_tol = kGroupZeroTol * (1.0 + (st.omega + st.l2).norm());
  for (Index k = 0; k < p; ++k) {
    if (st.upsilon.col(k).norm() > zero_tol) continue;
    out.omega.col(k).setZero();
    if (sh) out.omega.row(1 + k).setZero();
  }
  if (intercept) out.b0 = ybar - col_means.dot(Eigen::Map<const VectorXd>(out.omega.data(), d));
  st.b0 = out.b0;

  res.outer_iterations = st.iterations;
  res.omega_working = out;
  res.omega_hat = design.to_raw(out);
  res.final_objective = objective(design, out, pen, y);
  res.kkt = kkt_check(design, out, pen, y);
  res.tau_used = 0.0;
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (final_state) *final_state = std::move(st);
  return res;
}

}  // namespace gresh
