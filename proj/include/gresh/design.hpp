#pragma once

#include <optional>
#include <vector>

#include "gresh/types.hpp"

namespace gresh {

/// Largest p for which the augmented design may be materialized densely.
inline constexpr Index kMaterializeLimit = 64;

/// Quadratic-interaction design held implicitly through X, Z and column
/// scales. The augmented design has p^2 + p columns ordered column-block by
/// column-block, [x_k, z_1.z_k, ..., z_p.z_k] for k = 1..p, matching the
/// column-major vectorization of Omega. Immutable after construction.
class QuadraticDesign {
 public:
  static QuadraticDesign make(const MatrixXd& x, DesignScaling scaling, bool intercept);
  /// Z overrides the interaction generators; it must have the shape of X.
  static QuadraticDesign make(const MatrixXd& x, const MatrixXd& z, DesignScaling scaling,
                              bool intercept);

  Index n() const { return x_.rows(); }
  Index p() const { return x_.cols(); }
  /// Working main effects (column-standardized under Type-A).
  const MatrixXd& x() const { return x_; }
  const MatrixXd& z() const { return z_; }
  /// Column l2 norms of x().
  const VectorXd& s_b() const { return s_b_; }
  /// S_Phi[j,k] = ||z_j . z_k||_2.
  const MatrixXd& s_phi() const { return s_phi_; }
  /// True when the Type-B term scaling is active in the kernels.
  bool scaled() const { return scaling_ == DesignScaling::kTypeB; }
  bool intercept() const { return intercept_; }
  DesignScaling scaling() const { return scaling_; }
  /// Raw column norms removed by the Type-A standardization (ones otherwise).
  const VectorXd& standardization() const { return x_norm_raw_; }

  /// Maps solver (working) coefficients to coefficients of the raw X, so
  /// that predictions on new raw data are X b + diag(X Phi X^T) + b0.
  CoefMatrix to_raw(const CoefMatrix& working) const;
  CoefMatrix to_working(const CoefMatrix& raw) const;

  /// Upper bound on the spectral norm of the augmented design (including the
  /// intercept column), computed once at construction.
  double tau_hat() const { return tau_hat_; }
  bool tau_hat_certified() const { return tau_certified_; }

  /// Dense n x (p^2 + p [+1]) augmented design in working coordinates; the
  /// intercept column, when present, is last. Only for p <= kMaterializeLimit.
  MatrixXd materialize() const;

  /// Working-coordinate divisors applied by the kernels (ones unless Type-B).
  const VectorXd& div_b() const { return div_b_; }
  const MatrixXd& div_phi() const { return div_phi_; }

  /// Squared Frobenius norm of the augmented design.
  double frobenius_sq() const;

 private:
  QuadraticDesign() = default;

  MatrixXd x_, z_;
  VectorXd s_b_;
  MatrixXd s_phi_;
  VectorXd div_b_;
  MatrixXd div_phi_;
  VectorXd raw_div_b_;
  MatrixXd raw_div_phi_;
  VectorXd x_norm_raw_;
  DesignScaling scaling_ = DesignScaling::kNone;
  bool intercept_ = false;
  double tau_hat_ = 0.0;
  bool tau_certified_ = true;
};

/// X b + diag(Z Phi Z^T) (+ b0), computed without forming the p^2 columns.
VectorXd apply_xbreve(const QuadraticDesign& design, const CoefMatrix& omega, int threads = 1);

/// Adjoint of apply_xbreve: (X^T r, Z^T diag{r} Z) in working coordinates;
/// b0 receives 1^T r when the design has an intercept.
CoefMatrix apply_xbreve_adjoint(const QuadraticDesign& design, const VectorXd& r,
                                int threads = 1);

struct SpectralNormEstimate {
  double value = 0.0;
  bool converged = true;  // false: Frobenius fallback was returned
  int iterations = 0;
};

/// Power iteration on the augmented Gram operator from the normalized
/// all-ones vector. Stops when the eigen-residual is below tol relative to
/// the Rayleigh quotient and returns sqrt(mu + ||residual||), capped by the
/// Frobenius norm. After max_iter iterations the Frobenius norm is returned.
SpectralNormEstimate spectral_norm_xbreve(const QuadraticDesign& design, double tol,
                                          int max_iter = 500);

/// Predictions X b + diag(X Phi X^T) + b0 for raw-coordinate coefficients.
VectorXd predict_raw(const MatrixXd& x, const CoefMatrix& raw, int threads = 1);

/// Column ell2 norm of every pair product x_j . x_k.
MatrixXd hadamard_norms(const MatrixXd& z);

}  // namespace gresh
