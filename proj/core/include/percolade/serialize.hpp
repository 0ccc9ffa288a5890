#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "percolade/analysis.hpp"
#include "percolade/config.hpp"
#include "percolade/dfs.hpp"
#include "percolade/graph.hpp"

namespace percolade {

using json = nlohmann::json;

// Run JSON is schema-versioned ("format": 1), timestamp-free, and carries the
// full query snapshots, so a stored run re-audits offline against its graph.
json run_to_json(const DfsRun& run, const ExperimentConfig& cfg);

struct LoadedRun {
  DfsRun run;
  ExperimentConfig cfg;
};

// Throws schema_error on a wrong format version or a malformed document.
LoadedRun run_from_json(const json& j);

json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const json& j);

// Exact column set, one row per trial in trial order:
// trial,seed,cycle_found,cycle_len,long_edges,bad_blocks,failed,millis
std::string results_csv(std::span<const TrialResult> trials);
std::vector<TrialResult> parse_results_csv(const std::string& text);

struct SweepRow {
  double p = 0.0;
  double epsilon = 0.0;
  std::uint32_t k = 0;
  ExperimentStats stats;
};

std::string sweep_csv(std::span<const SweepRow> rows);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

// Aggregate report: config echo, closed-form bounds, empirical stats.
// generated_at appears only here and only when requested.
json report_json(const ExperimentConfig& cfg, const BoundReport& bounds,
                 const ExperimentStats& stats, bool with_timestamp);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace percolade
