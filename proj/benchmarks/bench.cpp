// Microbenchmarks for the three hot paths: meeting-time solves, network
// generation, and Monte Carlo fixation trials.

#include <cstdint>
#include <utility>
#include <vector>

#include <benchmark/benchmark.h>

#include "coopnet/generators.hpp"
#include "coopnet/graph.hpp"
#include "coopnet/meeting_times.hpp"
#include "coopnet/rng.hpp"
#include "coopnet/simulate.hpp"

namespace {

using namespace coopnet;

Graph er_graph(int n, double p, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.family = Family::ER;
  spec.n = n;
  spec.params = {{"p", p}};
  spec.seed = seed;
  return ensure_connected(spec);
}

void BM_MeetingTimesSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Graph g = er_graph(n, 0.3, 17);
  for (auto _ : state) {
    const MeetingTimes mt = meeting_times(g);
    benchmark::DoNotOptimize(mt.tau.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_MeetingTimesSolve)->Arg(32)->Arg(64)->Arg(128)->Arg(256)
    ->Unit(benchmark::kMillisecond)->Complexity();

void BM_GenerateER(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GeneratorSpec spec;
  spec.family = Family::ER;
  spec.n = n;
  spec.params = {{"p", 0.05}};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    spec.seed = seed++;
    const Graph g = generate(spec);
    benchmark::DoNotOptimize(g.edge_count());
  }
}
BENCHMARK(BM_GenerateER)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_GenerateSBM(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GeneratorSpec spec;
  spec.family = Family::SBM;
  spec.n = n;
  spec.params = {{"m", 3.0}, {"p", 0.1}, {"q", 0.02}};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    spec.seed = seed++;
    const Graph g = generate(spec);
    benchmark::DoNotOptimize(g.edge_count());
  }
}
BENCHMARK(BM_GenerateSBM)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_GenerateHolmeKim(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GeneratorSpec spec;
  spec.family = Family::HolmeKim;
  spec.n = n;
  spec.params = {{"links_per_node", 3.0}, {"p_triad", 0.5}};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    spec.seed = seed++;
    const Graph g = generate(spec);
    benchmark::DoNotOptimize(g.edge_count());
  }
}
BENCHMARK(BM_GenerateHolmeKim)
    ->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_GenerateUCM(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GeneratorSpec spec;
  spec.family = Family::UCM;
  spec.n = n;
  spec.params = {{"k_min", 2.0}, {"gamma", 2.5}};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    spec.seed = seed++;
    const Graph g = generate(spec);
    benchmark::DoNotOptimize(g.edge_count());
  }
}
BENCHMARK(BM_GenerateUCM)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_UpdateStep(benchmark::State& state) {
  const Graph g = er_graph(static_cast<int>(state.range(0)), 0.1, 23);
  const GameMatrix game = GameMatrix::donation(2.0, 1.0);
  StrategyState strategies(static_cast<size_t>(g.node_count()), 0);
  for (size_t i = 0; i < strategies.size(); i += 2) strategies[i] = 1;
  Rng rng(99);
  for (auto _ : state) {
    strategies = step(g, strategies, game, 0.01, rng);
    benchmark::DoNotOptimize(strategies.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_UpdateStep)->Arg(100)->Arg(400);

void BM_FixationTrial(benchmark::State& state) {
  const Graph g = er_graph(50, 0.2, 31);
  const GameMatrix game = GameMatrix::donation(2.0, 1.0);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    Rng rng(derive_seed(7, {trial++}));
    StrategyState strategies(50, 0);
    strategies[rng.below_int(50)] = 1;
    benchmark::DoNotOptimize(run_to_fixation(g, strategies, game, 0.01, rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FixationTrial)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
