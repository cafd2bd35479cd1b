#include <doctest.h>

#include <cmath>
#include <random>

#include "gresh/sim.hpp"
#include "oracles.hpp"

using namespace gresh;

namespace {

CoefMatrix signal(int id, Index p) {
  const ExampleSignal s = example_signal(id, p);
  CoefMatrix c(p, false);
  c.omega.row(0) = s.b_star.transpose();
  c.omega.bottomRows(p) = s.phi_star;
  return c;
}

}  // namespace

TEST_CASE("same seed and stream give identical data") {
  const SimScenario scn = make_scenario(2, 20, 9);
  const SimData a = gen_data(scn, 4);
  const SimData b = gen_data(scn, 4);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK_FALSE(gen_data(scn, 5).x == a.x);
}

TEST_CASE("noiseless data equal the true mean") {
  SimScenario scn = make_scenario(3, 10, 1);
  scn.sigma2 = 0.0;
  const SimData d = gen_data(scn);
  CHECK(d.y == d.mean);
}

TEST_CASE("Toeplitz correlation of adjacent columns") {
  SimScenario scn = make_scenario(1, 8, 2);
  scn.p = 5;
  scn.b_star = VectorXd::Zero(5);
  scn.phi_star = MatrixXd::Zero(5, 5);
  const SimData d = gen_data(scn, 0, 50000);
  const VectorXd c0 = d.x.col(0).array() - d.x.col(0).mean();
  const VectorXd c1 = d.x.col(1).array() - d.x.col(1).mean();
  const double corr = c0.dot(c1) / (c0.norm() * c1.norm());
  CHECK(std::abs(corr - 0.5) < 0.05);
}

TEST_CASE("example signals") {
  const ExampleSignal e1 = example_signal(1, 100);
  CHECK(e1.n_default == 40);
  const SparsityProfile s1 = sparsity_profile(signal(1, 100));
  CHECK(s1.jg == 4);
  CHECK(s1.je == 0);

  const SparsityProfile s2 = sparsity_profile(signal(2, 50));
  CHECK(example_signal(2, 50).n_default == 150);
  CHECK(s2.jg == 9);
  CHECK(s2.je == 12);
  CHECK(s2.j11 == 9);
  CHECK(s2.j10 == 0);
  CHECK(s2.j01 == 0);

  const ExampleSignal e3 = example_signal(3, 50);
  CHECK(e3.n_default == 100);
  for (Index j = 0; j < 50; ++j) CHECK((e3.b_star[j] != 0.0) == (j < 7));
  Index cells = 0;
  for (Index j = 0; j < 50; ++j)
    for (Index k = 0; k < 50; ++k) {
      const bool block = j < 5 && k < 5 && j != k;
      const bool extra = (j == 3 && (k == 5 || k == 6)) || (k == 3 && (j == 5 || j == 6));
      CHECK((e3.phi_star(j, k) != 0.0) == (block || extra));
      cells += e3.phi_star(j, k) != 0.0;
    }
  CHECK(cells == 24);
  CHECK_THROWS_AS(example_signal(2, 5), GreshError);
}

TEST_CASE("sparsity profile examples") {
  const SparsityProfile z = sparsity_profile(CoefMatrix(4, false));
  CHECK(z.j00 == 4);
  CHECK(z.jg + z.je + z.j11 + z.j10 + z.j01 == 0);
  CoefMatrix c(2, false);
  c.omega(0, 0) = 1.0;
  const SparsityProfile s = sparsity_profile(c);
  CHECK(s.jg == 1);
  CHECK(s.j10 == 1);
  CHECK(s.j00 == 1);
}

TEST_CASE("metrics examples") {
  const CoefMatrix star = signal(2, 12);
  const VectorXd mean = VectorXd::LinSpaced(5, 0.0, 1.0);
  const SimMetrics perfect = eval_metrics(mean, mean, star, star);
  CHECK(perfect.err == 0.0);
  CHECK(perfect.jd == 1.0);
  CHECK(perfect.m_rate == 0.0);
  CHECK(perfect.fa_rate == 0.0);
  const SimMetrics null = eval_metrics(mean, mean, star, CoefMatrix(12, false));
  CHECK(null.m_rate == 1.0);
  CHECK(null.jd == 0.0);
  CHECK(null.fa_rate == 0.0);
}

TEST_CASE("prediction gap") {
  std::mt19937_64 rng(3);
  const MatrixXd x = oracle::gaussian(15, 3, rng);
  const QuadraticDesign d = QuadraticDesign::make(x, DesignScaling::kTypeB, false);
  CoefMatrix a(3, false), b(3, false);
  a.omega = oracle::gaussian(4, 3, rng);
  b.omega = oracle::gaussian(4, 3, rng);
  CHECK(prediction_gap(d, a, a) == 0.0);
  CHECK(prediction_gap(d, a, CoefMatrix(3, false)) == doctest::Approx(apply_xbreve(d, a).squaredNorm()));
  const MatrixXd m = oracle::augmented_design(x, DesignScaling::kTypeB);
  const MatrixXd diff = a.omega - b.omega;
  const VectorXd v = Eigen::Map<const VectorXd>(diff.data(), diff.size());
  CHECK(prediction_gap(d, a, b) == doctest::Approx((m * v).squaredNorm()).epsilon(1e-12));
}

TEST_CASE("support recovery threshold") {
  CoefMatrix c(2, false);
  c.omega << 0.5, -2.0, 1.2, 0.0, 0.0, 0.9;
  // zeta = 0: threshold min(1.0, 0.8) = 0.8
  const std::vector<Index> rec = support_recovery_threshold(c, 1.0, 0.8);
  CHECK(rec == std::vector<Index>{1, 3, 5});
  CHECK(support_recovery_threshold(CoefMatrix(3, false), 0.1, 0.1).empty());
  CHECK(support_recovery_threshold(c, 1.0, 0.8, 1.0).size() == 2);
}

TEST_CASE("cone samples satisfy the cone condition and give positive ratios") {
  std::mt19937_64 rng(4);
  const Index p = 5;
  RestrictedSet set;
  set.jg = {0, 1};
  set.je = {{0, 1}, {1, 0}};
  const double vartheta = 1.0;
  const QuadraticDesign d =
      QuadraticDesign::make(oracle::gaussian(60, p, rng), DesignScaling::kTypeA, false);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const MatrixXd delta = sample_cone_direction(p, set, vartheta, 5, i);
    CHECK(delta.bottomRows(p) == delta.bottomRows(p).transpose());
    double on = 0.0, off = 0.0;
    for (Index k = 0; k < p; ++k) {
      const bool g = k < 2;
      (g ? on : off) += delta.col(k).norm();
      for (Index j = 0; j < p; ++j) {
        const bool e = (j == 0 && k == 1) || (j == 1 && k == 0);
        (e ? on : off) += std::abs(delta(1 + j, k));
      }
    }
    CHECK(off <= (1.0 + vartheta) * on * (1.0 + 1e-9));
    CHECK(kappa_ratio(d, delta, set) > 0.0);
  }
  CHECK(std::isnan(kappa_ratio(d, MatrixXd::Zero(p + 1, p), set)));
}

TEST_CASE("orthonormal design: ratios on the restricted set are one") {
  // n = 6 rows picking out single augmented columns of a p = 2 design
  MatrixXd x(2, 2);
  x << 1, 0, 0, 1;
  const QuadraticDesign d = QuadraticDesign::make(x, DesignScaling::kNone, false);
  RestrictedSet set;
  set.jg = {0};
  MatrixXd delta = MatrixXd::Zero(3, 2);
  delta(0, 0) = 1.0;
  // ||X-breve delta||^2 = 1, ||X-breve||^2 = 2, ||Delta_JG||^2 = 1
  CHECK(kappa_ratio(d, delta, set) == doctest::Approx(0.5));
}

TEST_CASE("estimate_kappa is deterministic and nonnegative") {
  std::mt19937_64 rng(6);
  const MatrixXd x = oracle::gaussian(100, 10, rng);
  RestrictedSet set;
  set.jg = {0, 1};
  set.je = {{0, 1}, {1, 0}};
  const AssumptionEstimate a = estimate_kappa(x, set, 1.0, 300, 7);
  const AssumptionEstimate b = estimate_kappa(x, set, 1.0, 300, 7);
  CHECK(a.kappa_hat == b.kappa_hat);
  CHECK(a.kappa_prime_hat == b.kappa_prime_hat);
  CHECK(a.kappa_hat >= 0.0);
  CHECK(a.kappa_prime_hat >= 0.0);
  CHECK(a.samples + a.skipped == 300);
}

TEST_CASE("benchmark replications are deterministic and thread-count independent") {
  BenchmarkConfig cfg;
  cfg.example_id = 2;
  cfg.p = 12;
  cfg.reps = 2;
  cfg.seed = 7;
  cfg.n_validation = 500;
  cfg.n_test = 500;
  cfg.threads = 1;
  const BenchmarkSummary a = run_benchmark(cfg);
  cfg.threads = 2;
  const BenchmarkSummary b = run_benchmark(cfg);
  REQUIRE(a.failures == 0);
  for (int r = 0; r < 2; ++r) {
    CHECK(a.reps[r].metrics.err == b.reps[r].metrics.err);
    CHECK(a.reps[r].lambda1 == b.reps[r].lambda1);
    CHECK(a.reps[r].metrics.jd == 1.0);
  }
}
