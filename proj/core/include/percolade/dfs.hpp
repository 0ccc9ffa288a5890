#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "percolade/config.hpp"
#include "percolade/forest.hpp"
#include "percolade/graph.hpp"
#include "percolade/percolation.hpp"

namespace percolade {

enum class VertexState : std::uint8_t { Unprocessed, Active, Processed, Trashed };
enum class BlockVerdict : std::uint8_t { Good, Bad, Incomplete };
enum class StepKind : std::uint8_t { Restart, Advance, Retreat };

// One completed batch of k processed vertices, plus the boundary snapshot.
struct BlockRecord {
  std::uint32_t index = 0;  // 1-based
  Vertex first_processed = Forest::npos;
  Vertex last_processed = Forest::npos;
  std::uint64_t boundary_step = 0;
  // |A| right after the boundary pop, before any rollback fires.
  std::uint32_t active_size = 0;
  // |S| after the boundary's checkpoint/rollback handling.
  std::uint32_t safe_size_after = 0;
  std::vector<std::uint8_t> outcomes;  // fresh layer-1 draws, consumption order
  std::uint32_t positives = 0;
  BlockVerdict verdict = BlockVerdict::Incomplete;
};

struct SafeEvent {
  enum class Kind : std::uint8_t { Create, Consume };
  Kind kind = Kind::Create;
  std::uint32_t block = 0;       // boundary at which the event fired
  Vertex anchor = Forest::npos;  // Create: block-start vertex the target was matched to
  Vertex vertex = Forest::npos;  // the checkpoint vertex itself
};

struct RollbackEvent {
  std::uint32_t block = 0;
  Vertex target = Forest::npos;  // search resumes from here
  std::vector<Vertex> trashed;
};

// Live machine state. All moves preserve: the active stack spans a path in
// the forest; vertices enter Active from Unprocessed at most once; Trashed is
// terminal.
struct DfsState {
  explicit DfsState(const Graph& g)
      : label(g.vertex_count(), VertexState::Unprocessed),
        ever_safe(g.vertex_count(), 0),
        pos_in_active(g.vertex_count(), 0),
        cursor(g.vertex_count(), 0),
        forest(g.vertex_count()),
        unprocessed(g.vertex_count()) {}

  std::vector<VertexState> label;
  std::vector<Vertex> active;  // bottom .. head
  std::vector<Vertex> safe;    // bottom .. top
  std::vector<std::uint8_t> ever_safe;
  std::vector<std::uint32_t> pos_in_active;  // valid while labeled Active
  std::vector<std::uint32_t> cursor;         // next adjacency slot to scan
  Forest forest;
  Vertex scan_from = 0;  // lower bound on the first Unprocessed id
  Vertex last_popped = Forest::npos;
  std::uint64_t unprocessed = 0;
  std::uint64_t pops = 0;  // cumulative processed count; never decreases
  std::uint64_t steps = 0;
  bool failed = false;
};

struct LongEdge {
  Vertex u = 0;
  Vertex v = 0;
  std::size_t rho = 0;  // forest distance between the endpoints
};

// Collected result of one run; self-contained enough to be re-audited offline.
struct DfsRun {
  Vertex n = 0;
  std::uint64_t trial_seed = 0;
  std::vector<VertexState> labels;
  std::vector<Vertex> active;
  std::vector<Vertex> safe;
  Forest forest;
  std::vector<BlockRecord> blocks;  // complete blocks, plus at most one Incomplete tail
  std::vector<SafeEvent> safe_events;
  std::vector<RollbackEvent> rollbacks;
  bool failed = false;
  std::uint32_t fail_block = 0;  // 0 = did not fail
  bool truncated = false;
  std::uint64_t steps = 0;
  std::uint64_t processed = 0;
  std::vector<std::pair<Edge, bool>> layer1_queries;  // canonical edge order
  std::vector<std::pair<Edge, bool>> layer2_queries;
  std::vector<LongEdge> long_edges;
  bool long_edges_computed = false;
  std::optional<std::vector<Vertex>> cycle;

  // Cumulative bad-block counts over complete blocks: z[i] = Z_{i+1}.
  std::vector<std::uint32_t> z_trace() const;
};

// Collects violations instead of throwing, so a broken engine still reports.
struct RunAudit {
  bool deep = true;  // full-state audits at block boundaries and at the end
  std::uint64_t steps_checked = 0;
  std::uint64_t full_audits = 0;
  std::uint64_t violation_count = 0;
  std::vector<std::string> violations;  // first 64 kept

  bool ok() const { return violation_count == 0; }
  void flag(std::string msg) {
    ++violation_count;
    if (violations.size() < 64) violations.push_back(std::move(msg));
  }

  std::vector<std::uint8_t> prev_trashed;  // monotonicity snapshot
};

// One transition: restart the stack from the first unprocessed vertex, extend
// the head along a positively queried edge, or retire the head.
StepKind dfs_step(DfsState& s, const Graph& g, EdgeOracle& oracle, std::uint32_t k);

// Bad iff some integer s in [ceil(d*k/2), min(floor(d*k), draws)] has fewer
// than (1+epsilon)*s/d positives among the first s draws. Empty window: good.
BlockVerdict classify_block(std::span<const std::uint8_t> outcomes, std::uint32_t k,
                            double d, double epsilon);

// At a boundary whose index is a multiple of 2k with the previous 2k blocks
// all good, pushes the active vertex nearest (in forest distance, earliest
// push breaking ties) to the first vertex of the block k batches back.
std::optional<SafeEvent> maybe_create_safe(DfsState& s,
                                           std::span<const BlockRecord> blocks,
                                           std::uint32_t k);

struct RollbackResult {
  bool failed = false;
  Vertex target = Forest::npos;
  std::vector<Vertex> trashed;
};

// Pops the checkpoint stack and trashes everything strictly above it on the
// active path together with those vertices' processed descendants. Fails the
// run when no usable checkpoint exists.
RollbackResult handle_bad_block(DfsState& s);

// Full machine loop: steps until the stack and the unprocessed pool are both
// empty, failure, or the step budget; classifies every completed block and
// fires the checkpoint rules at each boundary.
DfsRun run_dfs(const Graph& g, const ExperimentConfig& cfg, EdgeOracle& oracle,
               RunAudit* audit = nullptr);

// Full-state consistency check; appends findings to the audit.
void audit_state(const DfsState& s, const Graph& g, const EdgeOracle& oracle,
                 RunAudit& audit);

// Forest distance in the final forest; nullopt when disconnected there.
std::optional<std::size_t> rho(const DfsRun& run, Vertex x, Vertex y);

// Graph edges whose endpoints sit at forest distance >= alpha*k*d, sorted by
// decreasing distance (ties: by endpoints). Cached on the run.
const std::vector<LongEdge>& collect_long_edges(DfsRun& run, const Graph& g,
                                                const ExperimentConfig& cfg);

// Walks long edges in decreasing-rho order; the first one present in the
// percolated union (positive layer-1 memo, or a fresh layer-2 sprinkle)
// closes its forest path into a cycle of length rho + 1.
std::optional<std::vector<Vertex>> extract_cycle(DfsRun& run, const Graph& g,
                                                 EdgeOracle& oracle,
                                                 const ExperimentConfig& cfg);

// Unmodified depth-first search under plain Bernoulli(p) edge reveals;
// returns the longest active path observed (its length in edges is size-1).
std::vector<Vertex> baseline_dfs_path(const Graph& g, double p, std::uint64_t seed);

}  // namespace percolade
