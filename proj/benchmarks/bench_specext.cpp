#include <benchmark/benchmark.h>

#include "specext/realization.hpp"

using namespace specext;

namespace {

ArmaModel zeroless_model() {
  return arma_from_polar({1.0, 0.3, 0.3, 0.3}, {0.0, 0.0, 0.0, 0.0},
                         {1.0, 0.2, 0.3, 0.4}, {0.0, 1.0, 1.0, 1.0}, 2);
}

void bench_eval_poly(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const GridSpec grid{{N, N, N}};
  const ArmaModel model = zeroless_model();
  const SymTrigPoly poly = poly_from_filter(model.b, model.index_set());
  for (auto _ : state) benchmark::DoNotOptimize(eval_poly(poly, grid));
}
BENCHMARK(bench_eval_poly)->Arg(20)->Arg(40);

void bench_project_moments(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const GridSpec grid{{N, N, N}};
  const ArmaModel model = zeroless_model();
  const GridField phi = true_spectrum(model, grid);
  const IndexSet S = model.index_set();
  for (auto _ : state) benchmark::DoNotOptimize(project_moments(phi, S));
}
BENCHMARK(bench_project_moments)->Arg(20)->Arg(40);

void bench_dual_eval(benchmark::State& state) {
  const GridSpec grid{{20, 20, 20}};
  const ArmaModel model = zeroless_model();
  MomentData data = model_moments(model, grid);
  data.lambda = 1e-4;
  const DualPoint x = initial_point(data);
  const bool with_hessian = state.range(0) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(dual_eval(x, data, grid, with_hessian));
}
BENCHMARK(bench_dual_eval)->Arg(0)->Arg(1);

void bench_solve_section9(benchmark::State& state) {
  const GridSpec grid{{20, 20, 20}};
  const ArmaModel model = zeroless_model();
  MomentData data = model_moments(model, grid);
  data.lambda = 1e-4;
  for (auto _ : state) benchmark::DoNotOptimize(solve(data, grid));
}
BENCHMARK(bench_solve_section9)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
