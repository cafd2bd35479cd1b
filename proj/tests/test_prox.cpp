#include <doctest.h>

#include <random>

#include "gresh/prox.hpp"
#include "oracles.hpp"

using namespace gresh;

TEST_CASE("soft_threshold examples") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-0.5, 1.0) == 0.0);
  CHECK(soft_threshold(0.0, 5.0) == 0.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
}

TEST_CASE("group_soft_threshold examples") {
  VectorXd a(2);
  a << 3.0, 4.0;
  CHECK(group_soft_threshold(a, 5.0).isZero(0.0));
  const VectorXd s = group_soft_threshold(a, 2.5);
  CHECK(s[0] == doctest::Approx(1.5));
  CHECK(s[1] == doctest::Approx(2.0));
  CHECK(group_soft_threshold(VectorXd::Zero(3), 1.0).isZero(0.0));
}

TEST_CASE("symmetrize examples") {
  MatrixXd a(2, 2);
  a << 1, 2, 0, 3;
  MatrixXd expect(2, 2);
  expect << 1, 1, 1, 3;
  CHECK(symmetrize(a).isApprox(expect));
  CHECK(symmetrize(expect) == expect);
  CHECK(symmetrize(MatrixXd::Zero(3, 3)).isZero(0.0));
}

TEST_CASE("prox with vanishing group weight under SH is the symmetric projection") {
  std::mt19937_64 rng(11);
  const Index p = 3;
  const MatrixXd xi0 = oracle::gaussian(p + 1, p, rng);
  PenaltySpec pen;
  pen.mode = Hierarchy::kStrong;
  pen.lambda_b = VectorXd::Zero(p);
  pen.lambda_phi = MatrixXd::Zero(p, p);
  pen.lambda_omega = VectorXd::Constant(p, 1e-12);
  const DykstraResult r = dykstra_prox(xi0, pen, 200, 1e-14);
  CHECK((r.omega.row(0) - xi0.row(0)).norm() < 1e-9);
  CHECK((r.omega.bottomRows(p) - symmetrize(xi0.bottomRows(p))).norm() < 1e-9);
}

TEST_CASE("prox is zero when the group weights dominate a symmetric input") {
  std::mt19937_64 rng(12);
  const Index p = 3;
  MatrixXd xi0 = oracle::gaussian(p + 1, p, rng);
  xi0.bottomRows(p) = symmetrize(xi0.bottomRows(p));
  PenaltySpec pen;
  pen.mode = Hierarchy::kStrong;
  pen.lambda_b = VectorXd::Zero(p);
  pen.lambda_phi = MatrixXd::Zero(p, p);
  pen.lambda_omega.resize(p);
  for (Index k = 0; k < p; ++k) pen.lambda_omega[k] = xi0.col(k).norm() * 1.01;
  CHECK(dykstra_prox(xi0, pen, 50).omega.isZero(0.0));
}

TEST_CASE("WH prox equals column-wise soft then group threshold") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Index p = 2 + trial % 3;
    const MatrixXd xi0 = 2.0 * oracle::gaussian(p + 1, p, rng);
    const PenaltySpec pen = oracle::random_penalty(p, Hierarchy::kWeak, 0.05, 1.0, rng);
    MatrixXd expect(p + 1, p);
    for (Index k = 0; k < p; ++k) {
      VectorXd c(p + 1);
      c[0] = soft_threshold(xi0(0, k), pen.lambda_b[k]);
      for (Index j = 0; j < p; ++j) c[1 + j] = soft_threshold(xi0(1 + j, k), pen.lambda_phi(j, k));
      expect.col(k) = group_soft_threshold(c, pen.lambda_omega[k]);
    }
    const DykstraResult r = dykstra_prox(xi0, pen, 2000, 1e-15);
    CHECK((r.omega - expect).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("SH prox agrees with the smoothed Newton oracle") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 8; ++trial) {
    const Index p = 2 + trial % 3;
    const MatrixXd xi0 = 2.0 * oracle::gaussian(p + 1, p, rng);
    const PenaltySpec pen = oracle::random_penalty(p, Hierarchy::kStrong, 0.05, 1.0, rng);
    const DykstraResult r = dykstra_prox(xi0, pen, 20000, 1e-15);
    const MatrixXd ref = oracle::prox(xi0, pen);
    CHECK((r.omega - ref).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(prox_objective(r.omega, xi0, pen) <= prox_objective(ref, xi0, pen) + 1e-10);
    CHECK(r.omega.bottomRows(p) == r.omega.bottomRows(p).transpose());
  }
}

TEST_CASE("SH prox zeroes the mirrored row of every zero column") {
  std::mt19937_64 rng(15);
  const Index p = 4;
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd xi0 = oracle::gaussian(p + 1, p, rng);
    const PenaltySpec pen = oracle::random_penalty(p, Hierarchy::kStrong, 0.3, 1.5, rng);
    const MatrixXd om = dykstra_prox(xi0, pen, 500, 1e-14).omega;
    for (Index k = 0; k < p; ++k)
      if (om.col(k).isZero(0.0)) CHECK(om.row(1 + k).isZero(0.0));
  }
}
