#include <benchmark/benchmark.h>

#include <cmath>

#include "pinlab/limits.hpp"
#include "pinlab/scalar.hpp"

using namespace pinlab;

static void bm_laplacian(benchmark::State& state) {
  Grid g = build_grid(1.0, 1.0, static_cast<int>(state.range(0)));
  ScalarField f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f(i, j) = std::sin(3.0 * g.x(i)) * std::cos(2.0 * g.y(j));
  for (auto _ : state) {
    ScalarField l = neumann_laplacian(f);
    benchmark::DoNotOptimize(l.v.data());
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(bm_laplacian)->Arg(64)->Arg(128)->Arg(256);

static void bm_scalar_solve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid g = build_grid(1.0, 1.0, n);
  PinningField p = sample_periodic(CellFunction::checkerboard(0.5, 1.5), 0.25, g);
  for (auto _ : state) {
    ScalarSolve s = minimize_scalar(p, 0.1, 1e-10);
    benchmark::DoNotOptimize(s.energy);
  }
}
BENCHMARK(bm_scalar_solve)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void bm_cell_solve(benchmark::State& state) {
  const CellFunction cell = CellFunction::symmetric_checkerboard(0.5, 1.5);
  for (auto _ : state) {
    CellSolve c = cell_minimize(cell, 0.25, static_cast<int>(state.range(0)), 1e-10);
    benchmark::DoNotOptimize(c.energy);
  }
}
BENCHMARK(bm_cell_solve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void bm_obstacle_solve(benchmark::State& state) {
  Grid g = build_grid(1.0, 1.0, static_cast<int>(state.range(0)));
  LimitFields lf = solve_limit_fields(g);
  const double lam = 2.0 / (2.0 * std::abs(lf.xi0_min));
  for (auto _ : state) {
    ELambdaSolve r = minimize_e_lambda(lam, lf);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(bm_obstacle_solve)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
