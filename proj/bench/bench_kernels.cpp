// Serial reference kernels against their blocked OpenMP versions, plus the
// two design products that dominate a solver iteration.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "gresh/design.hpp"
#include "gresh/kernels.hpp"
#include "gresh/sim.hpp"

namespace {

using namespace gresh;

MatrixXd random_matrix(Index rows, Index cols, std::uint64_t stream) {
  auto rng = make_stream(2024, stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

int max_threads() { return omp_get_max_threads(); }

void BM_RowQuadraticForms(benchmark::State& state) {
  const Index n = state.range(0), p = state.range(1);
  const bool parallel = state.range(2) != 0;
  const MatrixXd z = random_matrix(n, p, 1);
  const MatrixXd phi = random_matrix(p, p, 2);
  VectorXd out(n);
  for (auto _ : state) {
    if (parallel)
      kernels::row_quadratic_forms(z, phi, out, max_threads());
    else
      kernels::row_quadratic_forms_serial(z, phi, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetLabel(parallel ? "openmp" : "serial");
}

void BM_WeightedGram(benchmark::State& state) {
  const Index n = state.range(0), p = state.range(1);
  const bool parallel = state.range(2) != 0;
  const MatrixXd z = random_matrix(n, p, 3);
  const VectorXd r = random_matrix(n, 1, 4);
  for (auto _ : state) {
    MatrixXd g = parallel ? kernels::weighted_gram(z, r, max_threads())
                          : kernels::weighted_gram_serial(z, r);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetLabel(parallel ? "openmp" : "serial");
}

void BM_TransposeTimes(benchmark::State& state) {
  const Index n = state.range(0), p = state.range(1);
  const bool parallel = state.range(2) != 0;
  const MatrixXd x = random_matrix(n, p, 5);
  const VectorXd r = random_matrix(n, 1, 6);
  for (auto _ : state) {
    VectorXd g = parallel ? kernels::transpose_times(x, r, max_threads())
                          : kernels::transpose_times_serial(x, r);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetLabel(parallel ? "openmp" : "serial");
}

void BM_DesignApply(benchmark::State& state) {
  const Index n = state.range(0), p = state.range(1);
  const int threads = state.range(2) != 0 ? max_threads() : 1;
  const QuadraticDesign design =
      QuadraticDesign::make(random_matrix(n, p, 7), DesignScaling::kTypeB, false);
  CoefMatrix omega(p, false);
  omega.omega = random_matrix(p + 1, p, 8);
  for (auto _ : state) {
    VectorXd u = apply_xbreve(design, omega, threads);
    benchmark::DoNotOptimize(u.data());
  }
  state.SetLabel(state.range(2) != 0 ? "openmp" : "serial");
}

void BM_DesignAdjoint(benchmark::State& state) {
  const Index n = state.range(0), p = state.range(1);
  const int threads = state.range(2) != 0 ? max_threads() : 1;
  const QuadraticDesign design =
      QuadraticDesign::make(random_matrix(n, p, 9), DesignScaling::kTypeB, false);
  const VectorXd r = random_matrix(n, 1, 10);
  for (auto _ : state) {
    CoefMatrix g = apply_xbreve_adjoint(design, r, threads);
    benchmark::DoNotOptimize(g.omega.data());
  }
  state.SetLabel(state.range(2) != 0 ? "openmp" : "serial");
}

void shapes(benchmark::internal::Benchmark* b) {
  for (const auto& [n, p] : {std::pair{100, 50}, std::pair{200, 200}, std::pair{1000, 200}})
    for (int par : {0, 1}) b->Args({n, p, par});
}

BENCHMARK(BM_RowQuadraticForms)->Apply(shapes);
BENCHMARK(BM_WeightedGram)->Apply(shapes);
BENCHMARK(BM_TransposeTimes)->Apply(shapes);
BENCHMARK(BM_DesignApply)->Apply(shapes);
BENCHMARK(BM_DesignAdjoint)->Apply(shapes);

}  // namespace

BENCHMARK_MAIN();
