#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "percolade/config.hpp"
#include "percolade/dfs.hpp"
#include "percolade/graph.hpp"

namespace percolade {

// min(1, 2*exp(-t^2 / (3*mu))) for binomial deviations below the mean scale;
// valid for 0 <= t <= mu/2.
double chernoff_bound(double mu, double t);

struct BoundValue {
  double raw = 0.0;      // closed form before clamping
  double value = 0.0;    // clamped to [0, 1]
  bool vacuous = false;  // raw <= 0 carries no information
};

struct BoundReport {
  double target_cycle_length = 0.0;  // eps^2 * k * d / 100
  double long_edge_threshold = 0.0;  // alpha * k * d
  BoundValue success_probability;    // 1 - 2*exp(-eps^2 k / (200 d))
  BoundValue block_good_probability; // 1 - d*k*exp(-eps^2 k / 12)
  double z_decay_rate = 0.0;         // exp(-lambda k / 2)
  BoundValue z_decay_probability;    // 1 - exp(-lambda k / 8)
  BoundValue sprinkling_probability; // 1 - exp(-eps^2 k / d)
  bool theorem_applies = false;      // eps >= 300 / sqrt(d)
};

BoundReport theorem_bounds(const ExperimentConfig& cfg);

// 95% score interval for a binomial proportion; {0, 1} when total is zero.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t total);

struct TrialResult {
  std::uint32_t trial = 0;
  std::uint64_t seed = 0;  // per-trial sub-seed
  bool cycle_found = false;
  std::uint64_t cycle_len = 0;
  std::uint64_t long_edges = 0;
  std::uint32_t bad_blocks = 0;
  bool failed = false;
  bool truncated = false;
  double millis = 0.0;
};

struct TrialOutput {
  TrialResult result;
  std::optional<DfsRun> run;
};

// One seeded run plus cycle extraction; the sub-seed is drawn from the
// config seed and the trial index, so trials are independent and replayable.
TrialOutput run_trial(const Graph& g, const ExperimentConfig& cfg, std::uint32_t trial,
                      bool keep_run = false, RunAudit* audit = nullptr);

struct ExperimentStats {
  std::uint32_t trials = 0;
  std::uint32_t found = 0;
  std::uint32_t failed = 0;
  std::uint32_t truncated = 0;
  double find_rate = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 1.0;
  double mean_cycle_length = 0.0;    // over trials with a cycle
  double stddev_cycle_length = 0.0;  // sample standard deviation of those
  double se_cycle_length = 0.0;
  double mean_long_edges = 0.0;
  double total_millis = 0.0;
};

struct ExperimentResult {
  std::vector<TrialResult> trials;  // trial-index order regardless of threads
  ExperimentStats stats;
  std::vector<DfsRun> runs;  // populated only when keep_runs
};

ExperimentResult run_experiment(const Graph& g, const ExperimentConfig& cfg,
                                unsigned threads, bool keep_runs = false);

ExperimentStats summarize_trials(std::span<const TrialResult> trials);

// Offline audit of a finished run against the graph and config it came from.
// Hard findings are machine-state contradictions; soft findings are expected
// high-probability properties that may legitimately fail on a given seed.
struct InvariantReport {
  std::vector<std::string> hard;
  std::vector<std::string> soft;
  std::uint64_t hard_checks = 0;
  std::uint64_t soft_checks = 0;
  bool ok() const { return hard.empty(); }
};

InvariantReport verify_run_invariants(const DfsRun& run, const Graph& g,
                                      const ExperimentConfig& cfg);

struct BlockStats {
  std::uint64_t total = 0;
  std::uint64_t good = 0;
  std::uint64_t bad = 0;
  std::uint64_t incomplete = 0;
  std::uint64_t vacuous_good = 0;  // good with too few draws to be testable
  double good_fraction = 0.0;      // over complete blocks
  double mean_queries = 0.0;       // fresh draws per complete block
  double mean_positives = 0.0;
};

BlockStats empirical_block_stats(std::span<const DfsRun> runs, const ExperimentConfig& cfg);

}  // namespace percolade
