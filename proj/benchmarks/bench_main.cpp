// Hot-path benchmarks: the search loop itself, long-edge collection over the
// finished forest, eager percolation, subset sampling, and the raw counter
// RNG that everything draws from.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <optional>

#include "percolade/analysis.hpp"
#include "percolade/config.hpp"
#include "percolade/dfs.hpp"
#include "percolade/generators.hpp"
#include "percolade/graph.hpp"
#include "percolade/percolation.hpp"
#include "percolade/rng.hpp"
#include "percolade/serialize.hpp"

namespace {

using namespace percolade;

const Graph& regular_2000() {
  static const Graph g = gen_random_regular(2000, 6, 17);
  return g;
}

// d sits well under the layer-1 reveal rate so runs complete instead of
// failing at the first window; the loop cost is what gets timed.
ExperimentConfig bench_config(double p) {
  return ExperimentConfig::make(10, 12.0, 0.5, p, std::nullopt, 3, 1, 0);
}

void BM_dfs_run_supercritical(benchmark::State& state) {
  const Graph& g = regular_2000();
  const ExperimentConfig cfg = bench_config(2.0 / 6);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    EdgeOracle oracle(g, cfg.split, seed++);
    const DfsRun run = run_dfs(g, cfg, oracle);
    benchmark::DoNotOptimize(run.processed);
  }
  state.SetItemsProcessed(state.iterations() * g.vertex_count());
}
BENCHMARK(BM_dfs_run_supercritical);

void BM_dfs_run_saturated(benchmark::State& state) {
  const Graph& g = regular_2000();
  const ExperimentConfig cfg = bench_config(1.0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    EdgeOracle oracle(g, cfg.split, seed++);
    const DfsRun run = run_dfs(g, cfg, oracle);
    benchmark::DoNotOptimize(run.processed);
  }
  state.SetItemsProcessed(state.iterations() * g.vertex_count());
}
BENCHMARK(BM_dfs_run_saturated);

void BM_long_edge_collection(benchmark::State& state) {
  const Graph& g = regular_2000();
  const ExperimentConfig cfg = bench_config(2.0 / 6);
  EdgeOracle oracle(g, cfg.split, 11);
  const DfsRun base = run_dfs(g, cfg, oracle);
  for (auto _ : state) {
    DfsRun run = base;
    run.long_edges_computed = false;
    run.long_edges.clear();
    benchmark::DoNotOptimize(collect_long_edges(run, g, cfg).size());
  }
  state.SetItemsProcessed(state.iterations() * g.edge_count());
}
BENCHMARK(BM_long_edge_collection);

void BM_percolate_full(benchmark::State& state) {
  const Graph g = gen_complete(300);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const Graph sub = percolate_full(g, 0.5, seed++);
    benchmark::DoNotOptimize(sub.edge_count());
  }
  state.SetItemsProcessed(state.iterations() * g.edge_count());
}
BENCHMARK(BM_percolate_full);

void BM_certify_sampled(benchmark::State& state) {
  const Graph g = gen_random_regular(200, 4, 9);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const ExpansionVerdict v = certify_sampled(g, 3, 2.0, 200, seed++);
    benchmark::DoNotOptimize(v.checked_subsets);
  }
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_certify_sampled);

void BM_run_json_round_trip(benchmark::State& state) {
  const Graph& g = regular_2000();
  const ExperimentConfig cfg = bench_config(2.0 / 6);
  EdgeOracle oracle(g, cfg.split, 11);
  const DfsRun base = run_dfs(g, cfg, oracle);
  for (auto _ : state) {
    const LoadedRun back = run_from_json(run_to_json(base, cfg));
    benchmark::DoNotOptimize(back.run.steps);
  }
}
BENCHMARK(BM_run_json_round_trip);

void BM_counter_rng(benchmark::State& state) {
  RandomStream stream(1, StreamClass::Generator, 0);
  std::uint64_t acc = 0;
  for (auto _ : state) acc ^= stream.next_u64();
  benchmark::DoNotOptimize(acc);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_counter_rng);

}  // namespace

BENCHMARK_MAIN();
