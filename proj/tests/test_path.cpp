#include <doctest.h>

#include <random>

#include "gresh/path.hpp"
#include "gresh/sim.hpp"
#include "oracles.hpp"

using namespace gresh;

namespace {

SimData example2(Index n, std::uint64_t stream) {
  return gen_data(make_scenario(2, 12, 3), stream, n);
}

}  // namespace

TEST_CASE("lambda_max of a zero response is zero") {
  std::mt19937_64 rng(1);
  const QuadraticDesign d =
      QuadraticDesign::make(oracle::gaussian(20, 3, rng), DesignScaling::kTypeB, false);
  CHECK(lambda_max(d, VectorXd::Zero(20), 0.5, Hierarchy::kStrong, GreshType::kB) == 0.0);
}

TEST_CASE("lambda_max brackets the null model and is homogeneous in y") {
  const SimData data = example2(150, 0);
  for (Hierarchy mode : {Hierarchy::kStrong, Hierarchy::kWeak}) {
    const QuadraticDesign d = QuadraticDesign::make(data.x, DesignScaling::kTypeB, true);
    const double lm = lambda_max(d, data.y, 0.5, mode, GreshType::kB);
    auto fit_at = [&](double l1) {
      return gresh_fit(d, data.y, PenaltySpec::from_lambdas(12, l1, 0.5 * l1, mode, GreshType::kB));
    };
    CHECK(fit_at(1.01 * lm).omega_working.omega.isZero(0.0));
    CHECK_FALSE(fit_at(0.5 * lm).omega_working.omega.isZero(0.0));
    const VectorXd y10 = 10.0 * data.y;
    CHECK(lambda_max(d, y10, 0.5, mode, GreshType::kB, false) ==
          doctest::Approx(10.0 * lambda_max(d, data.y, 0.5, mode, GreshType::kB, false)));
  }
}

TEST_CASE("ridge refit: empty support, OLS and normal equations") {
  std::mt19937_64 rng(2);
  const MatrixXd x = oracle::gaussian(30, 4, rng);
  const VectorXd y = oracle::gaussian(30, 1, rng);
  for (bool intercept : {false, true}) {
    const QuadraticDesign d = QuadraticDesign::make(x, DesignScaling::kTypeB, intercept);
    const CoefMatrix empty = ridge_refit(d, y, Support{}, 0.1);
    CHECK(empty.omega.isZero(0.0));
    CHECK(empty.b0 == doctest::Approx(intercept ? y.mean() : 0.0));

    Support s;
    s.mains = {0, 2};
    s.pairs = {{0, 2}, {1, 1}};
    MatrixXd a = support_design(d, s);
    VectorXd yc = y;
    if (intercept) {
      a.rowwise() -= a.colwise().mean();
      yc.array() -= y.mean();
    }
    for (double gamma : {0.0, 0.7}) {
      const CoefMatrix raw = ridge_refit(d, y, s, gamma);
      const CoefMatrix w = d.to_working(raw);
      VectorXd beta(4);
      beta << w.omega(0, 0), w.omega(0, 2), w.omega(1, 2) + w.omega(3, 0), w.omega(2, 1);
      MatrixXd k = a.transpose() * a;
      k.diagonal().array() += gamma;
      const VectorXd direct = k.ldlt().solve(a.transpose() * yc);
      CHECK((beta - direct).cwiseAbs().maxCoeff() < 1e-9);
      // residual orthogonality
      const VectorXd lhs = a.transpose() * (yc - a * beta);
      CHECK((lhs - gamma * beta).norm() <= 1e-8 * (1.0 + (a.transpose() * yc).norm()));
      // exact zeros off support
      CHECK(w.omega(0, 1) == 0.0);
      CHECK(w.omega(1, 1) == 0.0);
      CHECK(w.omega(3, 3) == 0.0);
    }
  }
}

TEST_CASE("single-node path is the null model") {
  const SimData data = example2(150, 1);
  const QuadraticDesign d = QuadraticDesign::make(data.x, DesignScaling::kTypeB, true);
  PathSpec spec;
  spec.n_lambda = 1;
  spec.validation = Validation{data.x, data.y};
  const PathResult path = solution_path(d, data.y, spec, Hierarchy::kStrong, GreshType::kB);
  REQUIRE(path.nodes.size() == 1);
  CHECK(path.nodes[0].fit.omega_working.omega.isZero(0.0));
  CHECK(path.selected == 0);
}

TEST_CASE("path contract: ordering, hierarchy, endpoints and tuning") {
  const SimData train = example2(150, 2);
  const SimData val = example2(2000, 3);
  for (Hierarchy mode : {Hierarchy::kStrong, Hierarchy::kWeak}) {
    const QuadraticDesign d = QuadraticDesign::make(train.x, DesignScaling::kTypeB, true);
    PathSpec spec;
    spec.n_lambda = 12;
    spec.validation = Validation{val.x, val.y};
    spec.solver.accelerate = true;
    const PathResult path = solution_path(d, train.y, spec, mode, GreshType::kB);
    REQUIRE(path.nodes.size() == 12);
    CHECK(path.nodes.front().support_groups == 0);
    CHECK(path.nodes.back().support_groups >= path.nodes.front().support_groups);
    int monotone = 0;
    for (std::size_t i = 0; i < path.nodes.size(); ++i) {
      const PathNode& n = path.nodes[i];
      CHECK_FALSE(n.failed);
      CHECK(hierarchy_check(n.fit.omega_working, mode));
      CHECK(n.lambda2 == doctest::Approx(0.5 * n.lambda1));
      if (i > 0) {
        CHECK(n.lambda1 < path.nodes[i - 1].lambda1);
        monotone += n.support_groups >= path.nodes[i - 1].support_groups;
      }
    }
    CHECK(monotone >= 0.9 * 11);
    for (const PathNode& n : path.nodes)
      CHECK(path.nodes[path.selected].validation_mse <= n.validation_mse);
    // tuning is an argmin over the set
    PathResult reversed = path;
    std::reverse(reversed.nodes.begin(), reversed.nodes.end());
    CHECK(reversed.nodes[tune(reversed)].lambda1 == path.nodes[path.selected].lambda1);
  }
}

TEST_CASE("tune breaks ties toward the larger lambda") {
  PathResult path;
  path.nodes.resize(3);
  const double l1[] = {3.0, 2.0, 1.0};
  const double mse[] = {0.5, 0.2, 0.2};
  for (int i = 0; i < 3; ++i) {
    path.nodes[i].lambda1 = l1[i];
    path.nodes[i].validation_mse = mse[i];
  }
  CHECK(tune(path) == 1);
  PathResult one;
  one.nodes.resize(1);
  one.nodes[0].validation_mse = 4.0;
  CHECK(tune(one) == 0);
}

TEST_CASE("warm start is no worse than a cold start at equal budget") {
  const SimData data = example2(150, 4);
  const QuadraticDesign d = QuadraticDesign::make(data.x, DesignScaling::kTypeB, true);
  const double lm = lambda_max(d, data.y, 0.5, Hierarchy::kStrong, GreshType::kB);
  SolverOptions o;
  const FitResult prev = gresh_fit(
      d, data.y, PenaltySpec::from_lambdas(12, 0.3 * lm, 0.15 * lm, Hierarchy::kStrong, GreshType::kB), o);
  const PenaltySpec pen =
      PenaltySpec::from_lambdas(12, 0.2 * lm, 0.1 * lm, Hierarchy::kStrong, GreshType::kB);
  o.max_outer = 30;
  const FitResult warm = gresh_fit(d, data.y, pen, o, prev.omega_working);
  const FitResult cold = gresh_fit(d, data.y, pen, o);
  CHECK(warm.final_objective <= cold.final_objective + 1e-8);
}

TEST_CASE("validation equal to training data with gamma = 0 selects the best node") {
  const SimData data = example2(150, 5);
  const QuadraticDesign d = QuadraticDesign::make(data.x, DesignScaling::kTypeB, true);
  PathSpec spec;
  spec.n_lambda = 6;
  spec.ridge_gamma = {0.0};
  spec.validation = Validation{data.x, data.y};
  const PathResult path = solution_path(d, data.y, spec, Hierarchy::kStrong, GreshType::kB);
  for (const PathNode& n : path.nodes)
    CHECK(path.nodes[path.selected].validation_mse <= n.validation_mse);
}

TEST_CASE("final column screen is a descent step toward the exact zero pattern") {
  // A loosely converged node of this path keeps a vanishing column that the
  // exact solution drops.
  const SimScenario scn = make_scenario(2, 10, 5);
  const SimData train = gen_data(scn, 0), val = gen_data(scn, 1, 500);
  const QuadraticDesign d = QuadraticDesign::make(train.x, DesignScaling::kTypeB, true);
  PathSpec spec;
  spec.validation = Validation{val.x, val.y};
  spec.solver.accelerate = true;
  const PathResult path = solution_path(d, train.y, spec, Hierarchy::kStrong, GreshType::kB);
  const PathNode& node = path.nodes[2];
  REQUIRE(node.fit.screened_columns >= 1);

  SolverOptions loose = spec.solver;
  loose.screen_columns = false;
  const FitResult raw = gresh_fit(d, train.y, node.fit.penalty, loose, path.nodes[1].fit.omega_working);
  SolverOptions screened = loose;
  screened.screen_columns = true;
  const FitResult fit =
      gresh_fit(d, train.y, node.fit.penalty, screened, path.nodes[1].fit.omega_working);
  CHECK(fit.screened_columns == node.fit.screened_columns);
  CHECK(fit.final_objective <= raw.final_objective);
  CHECK(fit.objective_trace.back() == fit.final_objective);

  SolverOptions exact;
  exact.outer_tol = 1e-11;
  exact.max_outer = 200000;
  const FitResult best = gresh_fit(d, train.y, node.fit.penalty, exact);
  const double resolution = loose.outer_tol * (1.0 + raw.omega_working.omega.norm());
  int dropped = 0;
  for (Index k = 0; k < d.p(); ++k) {
    if (fit.omega_working.omega.col(k).norm() > 0.0 || raw.omega_working.omega.col(k).norm() == 0.0)
      continue;
    ++dropped;
    CHECK(raw.omega_working.omega.col(k).norm() <= resolution);
    CHECK(best.omega_working.omega.col(k).norm() == 0.0);
  }
  CHECK(dropped == fit.screened_columns);
}
