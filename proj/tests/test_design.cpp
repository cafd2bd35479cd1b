#include <doctest.h>

#include <cmath>
#include <random>

#include "gresh/design.hpp"
#include "gresh/kernels.hpp"
#include "oracles.hpp"

using namespace gresh;

namespace {

CoefMatrix random_coef(Index p, bool intercept, std::mt19937_64& rng) {
  CoefMatrix c(p, intercept);
  c.omega = oracle::gaussian(p + 1, p, rng);
  if (intercept) c.b0 = 0.7;
  return c;
}

}  // namespace

TEST_CASE("augmented row for X = [[1, 2]]") {
  MatrixXd x(1, 2);
  x << 1, 2;
  const QuadraticDesign d = QuadraticDesign::make(x, DesignScaling::kNone, false);
  MatrixXd expect(1, 6);
  // blocks [x_1, x_1 x_1, x_2 x_1 | x_2, x_1 x_2, x_2 x_2]
  expect << 1, 1, 2, 2, 2, 4;
  CHECK(d.materialize().isApprox(expect));
}

TEST_CASE("apply on p = 1 gives X b + diag(X Phi X^T)") {
  MatrixXd x(2, 1);
  x << 2, 3;
  const QuadraticDesign d = QuadraticDesign::make(x, DesignScaling::kNone, false);
  CoefMatrix c(1, false);
  c.omega << 1, 1;
  const VectorXd u = apply_xbreve(d, c);
  CHECK(u[0] == doctest::Approx(6.0));
  CHECK(u[1] == doctest::Approx(12.0));
  CHECK(apply_xbreve(d, CoefMatrix(1, false)).isZero(0.0));
}

TEST_CASE("adjoint of zero residual is zero") {
  std::mt19937_64 rng(1);
  const QuadraticDesign d =
      QuadraticDesign::make(oracle::gaussian(6, 3, rng), DesignScaling::kTypeB, true);
  const CoefMatrix g = apply_xbreve_adjoint(d, VectorXd::Zero(6));
  CHECK(g.omega.isZero(0.0));
  CHECK(g.b0 == 0.0);
}

TEST_CASE("spectral norm of the 2x2 identity is sqrt(2)") {
  const QuadraticDesign d =
      QuadraticDesign::make(MatrixXd::Identity(2, 2), DesignScaling::kNone, false);
  const SpectralNormEstimate est = spectral_norm_xbreve(d, 1e-12);
  CHECK(est.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(d.tau_hat() >= std::sqrt(2.0) * (1.0 - 1e-12));
}

TEST_CASE("zero design has zero spectral norm") {
  const QuadraticDesign d = QuadraticDesign::make(MatrixXd::Zero(4, 3), DesignScaling::kNone, false);
  CHECK(spectral_norm_xbreve(d, 1e-10).value == 0.0);
}

TEST_CASE("zero column is rejected by Type-B and kept by Type-A") {
  MatrixXd x = MatrixXd::Ones(4, 2);
  x(1, 0) = 2.0;
  x.col(1).setZero();
  try {
    (void)QuadraticDesign::make(x, DesignScaling::kTypeB, false);
    FAIL("expected ZeroNormColumn");
  } catch (const GreshError& e) {
    CHECK(e.code() == ErrorCode::kZeroNormColumn);
  }
  const QuadraticDesign a = QuadraticDesign::make(x, DesignScaling::kTypeA, false);
  CHECK(a.x().col(1).isZero(0.0));
  CHECK(a.x().col(0).norm() == doctest::Approx(1.0));
}

TEST_CASE("interaction norms are symmetric") {
  std::mt19937_64 rng(7);
  const QuadraticDesign d =
      QuadraticDesign::make(oracle::gaussian(4, 3, rng), DesignScaling::kTypeB, false);
  CHECK(d.s_phi() == d.s_phi().transpose());
}

TEST_CASE("non-finite input is rejected") {
  MatrixXd x = MatrixXd::Ones(3, 2);
  x(0, 1) = std::nan("");
  CHECK_THROWS_AS((void)QuadraticDesign::make(x, DesignScaling::kTypeA, false), GreshError);
}

TEST_CASE("materialized design matches the column-by-column oracle") {
  std::mt19937_64 rng(2);
  const MatrixXd x = oracle::gaussian(9, 4, rng);
  for (DesignScaling s : {DesignScaling::kNone, DesignScaling::kTypeA, DesignScaling::kTypeB}) {
    const QuadraticDesign d = QuadraticDesign::make(x, s, true);
    const MatrixXd a = oracle::augmented_design(x, s);
    const MatrixXd m = d.materialize();
    CHECK(m.cols() == a.cols() + 1);
    CHECK((m.leftCols(a.cols()) - a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.col(a.cols()).isOnes(0.0));
    CHECK(d.frobenius_sq() == doctest::Approx(m.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("apply and adjoint match the materialized design") {
  std::mt19937_64 rng(3);
  for (int threads : {1, 3}) {
    for (DesignScaling s : {DesignScaling::kNone, DesignScaling::kTypeA, DesignScaling::kTypeB}) {
      const MatrixXd x = oracle::gaussian(13, 5, rng);
      const QuadraticDesign d = QuadraticDesign::make(x, s, true);
      const MatrixXd m = d.materialize();
      const CoefMatrix c = random_coef(5, true, rng);
      VectorXd v(m.cols());
      v << Eigen::Map<const VectorXd>(c.omega.data(), c.omega.size()), c.b0;
      CHECK((apply_xbreve(d, c, threads) - m * v).cwiseAbs().maxCoeff() < 1e-11);
      const VectorXd r = oracle::gaussian(13, 1, rng);
      const CoefMatrix g = apply_xbreve_adjoint(d, r, threads);
      const VectorXd mt = m.transpose() * r;
      CHECK((Eigen::Map<const VectorXd>(g.omega.data(), g.omega.size()) - mt.head(30))
                .cwiseAbs()
                .maxCoeff() < 1e-11);
      CHECK(g.b0 == doctest::Approx(mt[30]));
    }
  }
}

TEST_CASE("tau_hat bounds the SVD spectral norm") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 5 + trial * 7, p = 2 + trial % 4;
    const MatrixXd x = oracle::gaussian(n, p, rng);
    const bool intercept = trial % 2 == 0;
    for (DesignScaling s : {DesignScaling::kTypeA, DesignScaling::kTypeB}) {
      const QuadraticDesign d = QuadraticDesign::make(x, s, intercept);
      const double exact = oracle::spectral_norm(oracle::augmented_design(x, s), intercept);
      CHECK(d.tau_hat() >= exact * (1.0 - 1e-12));
      CHECK(d.tau_hat() <= exact * 1.01);
    }
  }
}

TEST_CASE("raw and working coordinates give the same predictions") {
  std::mt19937_64 rng(5);
  const MatrixXd x = oracle::gaussian(11, 4, rng);
  for (DesignScaling s : {DesignScaling::kNone, DesignScaling::kTypeA, DesignScaling::kTypeB}) {
    const QuadraticDesign d = QuadraticDesign::make(x, s, true);
    CoefMatrix w = random_coef(4, true, rng);
    w.scaled = true;
    w.phi() = symmetrize(w.omega.bottomRows(4));
    const CoefMatrix raw = d.to_raw(w);
    CHECK((predict_raw(x, raw) - apply_xbreve(d, w)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((d.to_working(raw).omega - w.omega).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("OpenMP kernels reproduce the serial reference bitwise") {
  std::mt19937_64 rng(6);
  const MatrixXd z = oracle::gaussian(301, 17, rng);
  const MatrixXd phi = oracle::gaussian(17, 17, rng);
  const VectorXd r = oracle::gaussian(301, 1, rng);
  VectorXd q_serial(301), q_par(301);
  kernels::row_quadratic_forms_serial(z, phi, q_serial);
  const MatrixXd g_serial = kernels::weighted_gram_serial(z, r);
  const VectorXd t_serial = kernels::transpose_times_serial(z, r);
  VectorXd q_one(301);
  kernels::row_quadratic_forms(z, phi, q_one, 1);
  const MatrixXd g_one = kernels::weighted_gram(z, r, 1);
  for (int threads : {1, 2, 4}) {
    kernels::row_quadratic_forms(z, phi, q_par, threads);
    CHECK((q_par - q_serial).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(q_par == q_one);
    const MatrixXd g = kernels::weighted_gram(z, r, threads);
    CHECK((g - g_serial).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(g == g_one);
    CHECK(g == g.transpose());
    CHECK((kernels::transpose_times(z, r, threads) - t_serial).cwiseAbs().maxCoeff() < 1e-10);
  }
}
