#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "convwave/exponents.hpp"
#include "convwave/fields.hpp"
#include "convwave/john_identity.hpp"
#include "convwave/kernel_matrix.hpp"
#include "convwave/radial_grid.hpp"
#include "convwave/solver.hpp"

namespace {

using namespace convwave;

GridPtr bench_grid(double dr, double r_max) {
  return std::make_shared<const RadialGrid>(RadialGrid::uniform(dr, r_max));
}

KernelSettings bench_settings() {
  KernelSettings s;
  s.eta_points = 32;
  s.near_points = 16;
  s.graded_levels = 24;
  return s;
}

void BM_kernel_build(benchmark::State& state) {
  const double dr = 1.0 / static_cast<double>(state.range(0));
  GridPtr grid = bench_grid(dr, 4.0);
  for (auto _ : state) {
    KernelMatrix K = KernelMatrix::build(grid, 3, 1.0, bench_settings());
    benchmark::DoNotOptimize(K.entry(0, 0));
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(grid->size()));
}
BENCHMARK(BM_kernel_build)->Arg(8)->Arg(16)->Arg(32)->Complexity();

void BM_kernel_apply(benchmark::State& state) {
  const double dr = 1.0 / static_cast<double>(state.range(0));
  GridPtr grid = bench_grid(dr, 8.0);
  KernelMatrix K = KernelMatrix::build(grid, 3, 1.0, bench_settings());
  RadialField u(grid, std::vector<double>(grid->size(), 0.25), 0.0);
  for (auto _ : state) {
    RadialField out = K.apply(u);
    benchmark::DoNotOptimize(out.values.data());
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(grid->size()));
}
BENCHMARK(BM_kernel_apply)->Arg(8)->Arg(16)->Arg(32)->Complexity();

void BM_solver_step(benchmark::State& state) {
  const double dr = 1.0 / static_cast<double>(state.range(0));
  GridPtr grid = bench_grid(dr, 8.0);
  ProblemSpec spec(3, 1.0, 2.0, 0.5, 1.0, 1.0, 1e-2);
  KernelMatrix K = KernelMatrix::build(grid, 3, 1.0, bench_settings());
  SolverConfig config;
  config.dr = dr;
  config.r_max = 8.0;
  config.probe_slope = 0.0;
  config.probe_offset = 0.0;

  const double dt = resolved_dt(config);
  std::vector<double> gv(grid->size());
  for (std::size_t i = 0; i < gv.size(); ++i)
    gv[i] = spec.eps * default_data_g(grid->nodes()[i], spec);
  RadialField prev(grid, std::vector<double>(grid->size(), 0.0), 0.0);
  RadialField curr(grid, gv, dt);
  for (auto _ : state) {
    RadialField next = step(prev, curr, K, spec, config);
    benchmark::DoNotOptimize(next.values.data());
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(grid->size()));
}
BENCHMARK(BM_solver_step)->Arg(16)->Arg(32)->Arg(64)->Complexity();

void BM_john_mean(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto b = [](double eta) { return 1.0 / (1.0 + eta * eta); };
  for (auto _ : state) {
    double v = john_sphere_mean(b, 1.3, 2.1, n);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_john_mean)->Arg(2)->Arg(3)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
