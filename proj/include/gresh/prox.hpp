#pragma once

#include "gresh/types.hpp"

namespace gresh {

/// sgn(a) * max(|a| - lam, 0), with sgn(0) = 0.
inline double soft_threshold(double a, double lam) {
  if (a > lam) return a - lam;
  if (a < -lam) return a + lam;
  return 0.0;
}

/// a * (1 - lam / ||a||_2)_+ , and 0 for a = 0.
VectorXd group_soft_threshold(const VectorXd& a, double lam);

/// (Phi + Phi^T) / 2.
MatrixXd symmetrize(const MatrixXd& phi);

/// Dykstra-like splitting for the proximity operator of
///   1/2 ||Omega - Xi0||_F^2 + ||lambda_b . b||_1 + ||Lambda . Phi||_1
///     + sum_k lambda_Omega[k] ||Omega_k||_2   [s.t. Phi = Phi^T under SH]
/// The weights passed here are the ones used verbatim by the sweeps: callers
/// hand in the symmetrized Lambda for SH. P and Q start at zero.
class DykstraSplitting {
 public:
  DykstraSplitting(const MatrixXd& xi0, const VectorXd& lambda_b, const MatrixXd& lambda_phi,
                   const VectorXd& lambda_omega, Hierarchy mode);

  /// One pass of sub-steps (i)-(vi).
  void sweep();

  /// The l1-side iterate; its Phi block is exactly symmetric under SH.
  const MatrixXd& xi() const { return xi_; }
  /// The group-thresholded iterate from sub-step (i).
  const MatrixXd& omega_group() const { return omega_group_; }
  /// ||omega_group - xi||_F after the last sweep.
  double gap() const { return gap_; }
  int sweeps() const { return sweeps_; }

 private:
  const VectorXd& lambda_b_;
  const MatrixXd& lambda_phi_;
  const VectorXd& lambda_omega_;
  Hierarchy mode_;
  MatrixXd xi_, omega_, omega_group_, p_, q_;
  double gap_ = 0.0;
  int sweeps_ = 0;
};

struct DykstraResult {
  MatrixXd omega;
  int sweeps = 0;
  double gap = 0.0;
};

/// Proximity operator of the combined penalty. Runs up to inner_iters sweeps
/// and stops early once the two iterates agree to theta_tol * (1 + ||Xi0||_F).
/// Lambda_Phi is symmetrized once under SH and used as is under WH.
DykstraResult dykstra_prox(const MatrixXd& xi0, const PenaltySpec& pen, int inner_iters = 10,
                           double theta_tol = 1e-8);

/// ||lambda_b . b||_1 + ||Lambda . Phi||_1 + sum_k lambda_Omega[k] ||Omega_k||_2.
double penalty_value(const MatrixXd& omega, const VectorXd& lambda_b, const MatrixXd& lambda_phi,
                     const VectorXd& lambda_omega);
double penalty_value(const MatrixXd& omega, const PenaltySpec& pen);

/// Objective minimized by dykstra_prox.
double prox_objective(const MatrixXd& omega, const MatrixXd& xi0, const PenaltySpec& pen);

}  // namespace gresh
