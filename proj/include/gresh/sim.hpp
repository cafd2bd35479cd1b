#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gresh/path.hpp"

namespace gresh {

/// Engine for one named random stream: (seed, stream, index) always yields
/// the same sequence, independent of how many other streams were drawn.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

struct SimScenario {
  Index n = 0;
  Index p = 0;
  double rho_corr = 0.5;
  VectorXd b_star;
  MatrixXd phi_star;  // symmetric
  double sigma2 = 1.0;
  int example_id = 0;  // 1, 2, 3, or 0 for custom
  std::uint64_t seed = 0;
};

struct ExampleSignal {
  VectorXd b_star;
  MatrixXd phi_star;
  Index n_default = 0;
  double sigma2 = 1.0;
};

/// The three benchmark signals; throws kInvalidInput when p is too small.
ExampleSignal example_signal(int id, Index p);

SimScenario make_scenario(int example_id, Index p, std::uint64_t seed);

struct SimData {
  MatrixXd x;
  VectorXd y;
  VectorXd mean;  // noiseless X b* + diag(X Phi* X^T)
};

/// Rows of X are N(0, Sigma) with Sigma_ij = rho^|i-j| (Cholesky factor);
/// y = mean + N(0, sigma2). `stream` separates training, validation and test
/// draws; `n_override` > 0 replaces scn.n.
SimData gen_data(const SimScenario& scn, std::uint64_t stream = 0, Index n_override = 0);

struct SparsityProfile {
  Index j11 = 0, j10 = 0, j01 = 0, j00 = 0, je = 0, jg = 0;
  Index je_w = 0, jg_w = 0;
};

SparsityProfile sparsity_profile(const CoefMatrix& omega, double tol = 1e-8);

struct SimMetrics {
  double err = 0.0;  // mean squared error against the true mean
  double jd = 0.0;
  double m_rate = 0.0;
  double fa_rate = 0.0;
  double wall_time = 0.0;
};

/// Rates are over all (p+1) x p cells of Omega; |value| > tol is nonzero.
SimMetrics eval_metrics(const VectorXd& true_mean_test, const VectorXd& pred_test,
                        const CoefMatrix& omega_star, const CoefMatrix& omega_hat,
                        double tol = 1e-8);

/// M(b_a - b_b, Phi_a - Phi_b) = ||X (b_a - b_b) + Xbar vec(Phi_a - Phi_b)||^2
/// in the design's working coordinates (intercepts ignored).
double prediction_gap(const QuadraticDesign& design, const CoefMatrix& a, const CoefMatrix& b);

struct AssumptionEstimate {
  double vartheta = 0.0;
  double kappa_hat = 0.0;        // standardized (Type-A) design
  double kappa_prime_hat = 0.0;  // fully column-scaled (Type-B) design
  Index samples = 0;
  Index skipped = 0;
};

/// Cell sets: je holds (j, k) Phi entries, jg column indices.
struct RestrictedSet {
  std::vector<std::pair<Index, Index>> je;
  std::vector<Index> jg;
};

/// Draws a perturbation with symmetric Phi block inside the cone of the
/// restricted-eigenvalue condition. Sample `index` only depends on
/// (seed, index).
MatrixXd sample_cone_direction(Index p, const RestrictedSet& set, double vartheta,
                               std::uint64_t seed, std::uint64_t index);

/// ||X-breve Delta||^2 / (||X-breve||^2 (||(Delta_Phi)_Je||^2 + ||Delta_JG||_F^2)),
/// or NaN when the denominator vanishes.
double kappa_ratio(const QuadraticDesign& design, const MatrixXd& delta, const RestrictedSet& set);

/// Minimum ratio over n_samples cone directions, for the Type-A and the
/// Type-B scaled design of the same raw X.
AssumptionEstimate estimate_kappa(const MatrixXd& x, const RestrictedSet& set, double vartheta,
                                  Index n_samples, std::uint64_t seed);

/// Flat column-major indices of vec(Omega) with |value| > sqrt(1 + zeta^2) min(lambda1, lambda2).
std::vector<Index> support_recovery_threshold(const CoefMatrix& omega, double lambda1,
                                              double lambda2, double zeta = 0.0);

/// The rate levels A * sigma * sqrt(log(e p)) of the penalty parameters.
double rate_lambda(double a, double sigma, Index p);

/// Flat indices of the nonzero cells of Omega.
std::vector<Index> flat_support(const CoefMatrix& omega, double tol = 1e-8);

struct BenchmarkConfig {
  int example_id = 2;
  Index p = 50;
  int reps = 10;
  bool use_admm = false;
  std::uint64_t seed = 1;
  Hierarchy mode = Hierarchy::kStrong;
  GreshType type = GreshType::kB;
  bool intercept = true;
  bool accelerate = true;
  Index n_validation = 10000;
  Index n_test = 10000;
  /// Also fit at the rate levels (A1, A2, sigma) and threshold that fit's
  /// working coefficients at sqrt(1 + zeta^2) min(lambda1, lambda2).
  bool check_recovery = false;
  double rate_a1 = 2.0;
  double rate_a2 = 1.0;
  double sigma = 1.0;
  double zeta = 0.0;
  int threads = 0;  // replications in parallel; < 1 resolves via GRESH_THREADS
};

struct ReplicationResult {
  SimMetrics metrics;
  double path_time = 0.0;
  int selected = -1;
  double lambda1 = 0.0;
  bool support_recovered = false;
  long outer_iterations = 0;  // summed over the path
  int path_nodes = 0;
  int hierarchy_failures = 0;  // path nodes failing hierarchy_check for the mode
  bool failed = false;
  std::string error;
};

struct BenchmarkSummary {
  BenchmarkConfig config;
  std::vector<ReplicationResult> reps;
  int failures = 0;
  double median_err100 = 0.0;  // x100 convention
  double jd100 = 0.0;
  double m100 = 0.0;
  double fa100 = 0.0;
  double mean_path_time = 0.0;
  double recovery_rate = 0.0;
};

BenchmarkSummary run_benchmark(const BenchmarkConfig& cfg);

/// One full replication: data, path, tuning, refit, evaluation.
ReplicationResult run_replication(const BenchmarkConfig& cfg, int rep);

}  // namespace gresh
