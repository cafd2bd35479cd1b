#include "gresh/prox.hpp"

#include <cmath>

namespace gresh {

VectorXd group_soft_threshold(const VectorXd& a, double lam) {
  const double norm = a.norm();
  if (norm == 0.0 || norm <= lam) return VectorXd::Zero(a.size());
  return a * ((norm - lam) / norm);
}

MatrixXd symmetrize(const MatrixXd& phi) {
  if (phi.rows() != phi.cols())
    throw GreshError(ErrorCode::kDimensionMismatch, "symmetrize needs a square matrix");
  return (phi + phi.transpose()) / 2.0;
}

PenaltySpec PenaltySpec::from_lambdas(Index p, double lambda1, double lambda2, Hierarchy mode,
                                      GreshType type) {
  PenaltySpec pen;
  pen.lambda_b = VectorXd::Zero(p);
  pen.lambda_phi = MatrixXd::Constant(p, p, lambda1);
  pen.lambda_omega = VectorXd::Constant(p, lambda2);
  pen.mode = mode;
  pen.type = type;
  return pen;
}

void PenaltySpec::validate() const {
  const Index p = lambda_b.size();
  if (lambda_phi.rows() != p || lambda_phi.cols() != p || lambda_omega.size() != p)
    throw GreshError(ErrorCode::kDimensionMismatch, "penalty weights have inconsistent shapes");
  if (!lambda_b.allFinite() || !lambda_phi.allFinite() || !lambda_omega.allFinite())
    throw GreshError(ErrorCode::kInvalidPenalty, "penalty weights must be finite");
  if ((lambda_b.array() < 0.0).any() || (lambda_phi.array() < 0.0).any())
    throw GreshError(ErrorCode::kInvalidPenalty, "l1 weights must be nonnegative");
  if (!(lambda_omega.array() > 0.0).all())
    throw GreshError(ErrorCode::kInvalidPenalty, "group weights lambda_Omega must be positive");
}

DykstraSplitting::DykstraSplitting(const MatrixXd& xi0, const VectorXd& lambda_b,
                                   const MatrixXd& lambda_phi, const VectorXd& lambda_omega,
                                   Hierarchy mode)
    : lambda_b_(lambda_b),
      lambda_phi_(lambda_phi),
      lambda_omega_(lambda_omega),
      mode_(mode),
      xi_(xi0),
      omega_(xi0.rows(), xi0.cols()),
      omega_group_(xi0.rows(), xi0.cols()),
      p_(MatrixXd::Zero(xi0.rows(), xi0.cols())),
      q_(MatrixXd::Zero(xi0.rows(), xi0.cols())) {}

void DykstraSplitting::sweep() {
  const Index p = xi_.cols();
  // (i) columnwise group threshold of Xi + P
  for (Index k = 0; k < p; ++k) {
    const auto col = xi_.col(k) + p_.col(k);
    const double norm = col.norm();
    const double lam = lambda_omega_[k];
    if (norm == 0.0 || norm <= lam)
      omega_.col(k).setZero();
    else
      omega_.col(k) = col * ((norm - lam) / norm);
  }
  omega_group_ = omega_;
  // (ii)
  p_ += xi_ - omega_;
  // (iii) soft-threshold the main-effect row
  for (Index k = 0; k < p; ++k) xi_(0, k) = soft_threshold(omega_(0, k) + q_(0, k), lambda_b_[k]);
  // (iv) project the Phi block onto symmetric matrices
  if (mode_ == Hierarchy::kStrong) {
    for (Index k = 0; k < p; ++k) {
      for (Index j = k + 1; j < p; ++j) {
        const double avg = (omega_(1 + j, k) + omega_(1 + k, j)) / 2.0;
        omega_(1 + j, k) = avg;
        omega_(1 + k, j) = avg;
      }
    }
  }
  // (v) soft-threshold the Phi block
  for (Index k = 0; k < p; ++k)
    for (Index j = 0; j < p; ++j)
      xi_(1 + j, k) = soft_threshold(omega_(1 + j, k) + q_(1 + j, k), lambda_phi_(j, k));
  // (vi)
  q_ += omega_ - xi_;
  gap_ = (omega_group_ - xi_).norm();
  ++sweeps_;
}

DykstraResult dykstra_prox(const MatrixXd& xi0, const PenaltySpec& pen, int inner_iters,
                           double theta_tol) {
  pen.validate();
  const Index p = pen.p();
  if (xi0.rows() != p + 1 || xi0.cols() != p)
    throw GreshError(ErrorCode::kDimensionMismatch, "Xi0 must be (p+1) x p");
  if (inner_iters < 1) throw GreshError(ErrorCode::kInvalidInput, "inner_iters must be >= 1");

  const MatrixXd lambda_phi =
      pen.mode == Hierarchy::kStrong ? symmetrize(pen.lambda_phi) : pen.lambda_phi;
  DykstraSplitting split(xi0, pen.lambda_b, lambda_phi, pen.lambda_omega, pen.mode);
  const double stop = theta_tol * (1.0 + xi0.norm());
  do {
    split.sweep();
  } while (split.sweeps() < inner_iters && split.gap() > stop);
  return {split.xi(), split.sweeps(), split.gap()};
}

double penalty_value(const MatrixXd& omega, const VectorXd& lambda_b, const MatrixXd& lambda_phi,
                     const VectorXd& lambda_omega) {
  const Index p = omega.cols();
  double total = lambda_b.cwiseProduct(omega.row(0).transpose()).lpNorm<1>();
  total += lambda_phi.cwiseProduct(omega.bottomRows(p)).lpNorm<1>();
  for (Index k = 0; k < p; ++k) total += lambda_omega[k] * omega.col(k).norm();
  return total;
}

double penalty_value(const MatrixXd& omega, const PenaltySpec& pen) {
  return penalty_value(omega, pen.lambda_b, pen.lambda_phi, pen.lambda_omega);
}

double prox_objective(const MatrixXd& omega, const MatrixXd& xi0, const PenaltySpec& pen) {
  return 0.5 * (omega - xi0).squaredNorm() + penalty_value(omega, pen);
}

}  // namespace gresh
