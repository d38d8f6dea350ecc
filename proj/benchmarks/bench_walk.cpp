#include <benchmark/benchmark.h>

#include <cmath>

#include "qwalk/bound_states.hpp"
#include "qwalk/decoherence.hpp"
#include "qwalk/oracle.hpp"
#include "qwalk/walk.hpp"

using namespace qwalk;

namespace {

const double kInv = 1.0 / std::sqrt(2.0);

void BM_Evolve(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  const PhaseDefect d = PhaseDefect::with_phi(1.0 / 6.0);
  for (auto _ : state) {
    const WalkState st =
        evolve(initial_state(kInv, complexd{0.0, -kInv}), d, steps);
    benchmark::DoNotOptimize(st.total_norm());
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_Evolve)->Arg(50)->Arg(200)->Arg(800);

void BM_BoundStateMake(benchmark::State& state) {
  for (auto _ : state) {
    const BoundState bs = BoundState::make(Branch::plus, 1.0 / 6.0);
    benchmark::DoNotOptimize(bs.c_norm());
  }
}
BENCHMARK(BM_BoundStateMake);

void BM_StationaryResidual(benchmark::State& state) {
  const int window = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto r = oracle::stationary_residual(Branch::plus, 0.5, window, 2);
    benchmark::DoNotOptimize(r.residual);
  }
}
BENCHMARK(BM_StationaryResidual)->Arg(50)->Arg(200);

void BM_PathSum(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  const PhaseDefect d = PhaseDefect::with_phi(0.3);
  for (auto _ : state) {
    const auto dist = oracle::path_sum_distribution(1.0, 0.0, d, steps);
    benchmark::DoNotOptimize(dist.size());
  }
}
BENCHMARK(BM_PathSum)->Arg(8)->Arg(10)->Arg(12);

void BM_Decohere(benchmark::State& state) {
  const int traj = static_cast<int>(state.range(0));
  const PhaseDefect d = PhaseDefect::with_phi(0.5);
  for (auto _ : state) {
    const auto dist = evolve_decohered(1.0, 0.0, d, {0.5}, 30, traj, 42);
    benchmark::DoNotOptimize(dist.sites.size());
  }
  state.SetItemsProcessed(state.iterations() * traj);
}
BENCHMARK(BM_Decohere)->Arg(200)->Arg(1000);

void BM_OverlapGrid(benchmark::State& state) {
  for (auto _ : state) {
    double acc = 0.0;
    for (int k = 1; k < 200; ++k) {
      acc += total_overlap(k / 200.0, kInv, complexd{0.0, kInv}).total;
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_OverlapGrid);

}  // namespace

BENCHMARK_MAIN();
