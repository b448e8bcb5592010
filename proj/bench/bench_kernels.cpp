// Serial reference vs OpenMP kernels on the full evolution right side and on
// the per-node passes it is built from. Grids far beyond the paper's sizes
// show where the fork/join overhead amortizes.

#include <benchmark/benchmark.h>

#include "vem/evolution.hpp"
#include "vem/problems.hpp"

namespace {

vem::TrajectoryGrid grid_for(int nodes) {
  return vem::init_straightline_brachistochrone(nodes);
}

void bench_rhs(benchmark::State& state, vem::Exec exec) {
  const vem::ProblemModel p = vem::brachistochrone();
  const vem::GainConfig gains = vem::GainConfig::scaled_identity(p.m, 0.1, 0.05);
  const int nodes = static_cast<int>(state.range(0));
  const vem::TrajectoryGrid traj = grid_for(nodes);
  const vem::Vector flat = vem::pack_state(traj, p.tf_mode);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vem::epde_rhs(p, gains, nodes, flat, true, exec));
  }
  state.SetComplexityN(nodes);
}

void bench_gradient_field(benchmark::State& state, vem::Exec exec) {
  const vem::ProblemModel p = vem::brachistochrone();
  const int nodes = static_cast<int>(state.range(0));
  const vem::TrajectoryGrid traj = grid_for(nodes);
  const vem::NodalData nd = vem::evaluate_nodes(p, traj, exec);
  const vem::TransitionSet ts = vem::build_transition_set(p, traj, nd, exec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vem::compute_gradient_field(p, traj, ts, nd, exec));
  }
  state.SetComplexityN(nodes);
}

void bench_nodal_eval(benchmark::State& state, vem::Exec exec) {
  const vem::ProblemModel p = vem::brachistochrone();
  const int nodes = static_cast<int>(state.range(0));
  const vem::TrajectoryGrid traj = grid_for(nodes);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vem::evaluate_nodes(p, traj, exec));
  }
  state.SetComplexityN(nodes);
}

}  // namespace

BENCHMARK_CAPTURE(bench_rhs, serial, vem::Exec::Serial)
    ->RangeMultiplier(4)->Range(101, 25856)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(bench_rhs, parallel, vem::Exec::Parallel)
    ->RangeMultiplier(4)->Range(101, 25856)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(bench_gradient_field, serial, vem::Exec::Serial)
    ->RangeMultiplier(4)->Range(101, 25856)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(bench_gradient_field, parallel, vem::Exec::Parallel)
    ->RangeMultiplier(4)->Range(101, 25856)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(bench_nodal_eval, serial, vem::Exec::Serial)
    ->RangeMultiplier(4)->Range(101, 25856)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(bench_nodal_eval, parallel, vem::Exec::Parallel)
    ->RangeMultiplier(4)->Range(101, 25856)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
