#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace gresh {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Index = Eigen::Index;

enum class Hierarchy { kStrong, kWeak };
enum class GreshType { kA, kB };
enum class Loss { kSquared, kLogistic };

/// How the raw main-effect and interaction columns are scaled before fitting.
/// kTypeA standardizes X and then forms products; kTypeB scales every column
/// of the full quadratic design (mains and products) to unit l2 norm.
enum class DesignScaling { kNone, kTypeA, kTypeB };

inline DesignScaling scaling_for(GreshType t) {
  return t == GreshType::kA ? DesignScaling::kTypeA : DesignScaling::kTypeB;
}

enum class ErrorCode {
  kInvalidInput,
  kZeroNormColumn,
  kDimensionMismatch,
  kInvalidPenalty,
  kInvalidStepSize,
};

std::string_view to_string(ErrorCode code);
std::string_view to_string(Hierarchy mode);
std::string_view to_string(GreshType type);
std::string_view to_string(Loss loss);

class GreshError : public std::runtime_error {
 public:
  GreshError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Coefficients of the quadratic model stacked as Omega = [b, Phi^T]^T, a
/// (p+1) x p matrix whose column k is [b_k, phi_k^T]^T. Row 0 holds b and
/// rows 1..p hold Phi. The intercept b0 is never penalized.
struct CoefMatrix {
  MatrixXd omega;
  double b0 = 0.0;
  bool has_intercept = false;
  // true when the entries live in the solver's scaled working coordinates
  bool scaled = false;

  CoefMatrix() = default;
  CoefMatrix(Index p, bool intercept)
      : omega(MatrixXd::Zero(p + 1, p)), has_intercept(intercept) {}

  Index p() const { return omega.cols(); }
  auto b() { return omega.row(0); }
  auto b() const { return omega.row(0); }
  auto phi() { return omega.bottomRows(omega.rows() - 1); }
  auto phi() const { return omega.bottomRows(omega.rows() - 1); }

  bool is_zero() const { return omega.isZero(0.0) && b0 == 0.0; }
};

/// Penalty weights of the general problem
///   ||lambda_b . b||_1 + ||Lambda_Phi . Phi||_1 + sum_k lambda_Omega[k] ||Omega_k||_2
/// expressed in the solver's working coordinates.
struct PenaltySpec {
  VectorXd lambda_b;      // p, >= 0
  MatrixXd lambda_phi;    // p x p, >= 0
  VectorXd lambda_omega;  // p, > 0
  Hierarchy mode = Hierarchy::kStrong;
  GreshType type = GreshType::kB;

  Index p() const { return lambda_b.size(); }

  /// The two-parameter form: Lambda_Phi = lambda1 * 11^T, lambda_Omega =
  /// lambda2 * 1, lambda_b = 0. Applies to both types once the design scaling
  /// has been folded into the working coordinates.
  static PenaltySpec from_lambdas(Index p, double lambda1, double lambda2, Hierarchy mode,
                                  GreshType type);

  /// Throws kInvalidPenalty when a weight is negative, non-finite, or a group
  /// weight is zero.
  void validate() const;
};

}  // namespace gresh
