// End-to-end solver microbenchmarks on the rough-coefficient benchmark
// problem: scheme-table assembly, the policy-iteration solve, and the
// truncated (regularized) pair. Arguments are the inverse grid step, so
// Arg(16) means h = 1/16.

#include <benchmark/benchmark.h>

#include <utility>

#include "isaacs/discrete.hpp"
#include "isaacs/experiments.hpp"
#include "isaacs/grid.hpp"
#include "isaacs/problem.hpp"
#include "isaacs/solver.hpp"
#include "isaacs/stencil.hpp"

namespace {

isaacs::GridFunction boundary_start(const isaacs::IsaacsProblem& problem,
                                    const isaacs::Grid& grid) {
  return isaacs::sample(grid,
                        [&](const isaacs::Point& x) { return problem.g.value(x); });
}

void build_tables(benchmark::State& state) {
  const auto problem = isaacs::make_rough_benchmark();
  const double h = 1.0 / static_cast<double>(state.range(0));
  const auto grid = isaacs::build_grid(problem.domain, isaacs::default_stencil(2), h);
  for (auto _ : state) {
    const auto tables = isaacs::build_scheme_tables(problem, grid);
    benchmark::DoNotOptimize(tables.rows.data());
  }
  state.counters["interior"] = static_cast<double>(grid.n_interior);
}

void policy_solve(benchmark::State& state) {
  const auto problem = isaacs::make_rough_benchmark();
  const double h = 1.0 / static_cast<double>(state.range(0));
  const auto grid = isaacs::build_grid(problem.domain, isaacs::default_stencil(2), h);
  const auto tables = isaacs::build_scheme_tables(problem, grid);
  const auto initial = boundary_start(problem, grid);
  const isaacs::SolveConfig config{};
  double residual = 0.0;
  for (auto _ : state) {
    auto [w, report] = isaacs::solve_scheme(tables, initial, config);
    benchmark::DoNotOptimize(w.values.data());
    residual = report.final_residual;
  }
  state.counters["interior"] = static_cast<double>(grid.n_interior);
  state.counters["residual"] = residual;
}

void truncated_pair(benchmark::State& state) {
  const auto problem = isaacs::make_rough_benchmark();
  const double h = 1.0 / static_cast<double>(state.range(0));
  const auto grid = isaacs::build_grid(problem.domain, isaacs::default_stencil(2), h);
  const double K = 8.0;
  for (auto _ : state) {
    auto pair = isaacs::solve_truncated_pair(problem, grid, K);
    benchmark::DoNotOptimize(pair.u.values.data());
    benchmark::DoNotOptimize(pair.v.values.data());
  }
  state.counters["interior"] = static_cast<double>(grid.n_interior);
}

}  // namespace

BENCHMARK(build_tables)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(policy_solve)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(truncated_pair)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
