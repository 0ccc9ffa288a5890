#include "percolade/dfs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "percolade/errors.hpp"
#include "percolade/rng.hpp"

namespace percolade {

namespace {

std::string vertex_name(Vertex v) {
  return v == Forest::npos ? std::string("-") : std::to_string(v);
}

// Induction-step checks for the transition that just fired.
void audit_step(const DfsState& s, const Graph& g, const EdgeOracle& oracle,
                StepKind kind, RunAudit& audit) {
  ++audit.steps_checked;
  switch (kind) {
    case StepKind::Restart: {
      if (s.active.size() != 1) {
        audit.flag("restart left " + std::to_string(s.active.size()) + " active vertices");
        break;
      }
      const Vertex v = s.active.back();
      if (s.label[v] != VertexState::Active) audit.flag("restart vertex " + vertex_name(v) + " not active");
      if (!s.forest.is_root(v)) audit.flag("restart vertex " + vertex_name(v) + " has a parent");
      break;
    }
    case StepKind::Advance: {
      if (s.active.size() < 2) {
        audit.flag("advance with fewer than two active vertices");
        break;
      }
      const Vertex u = s.active.back();
      const Vertex v = s.active[s.active.size() - 2];
      if (s.label[u] != VertexState::Active) audit.flag("advanced vertex " + vertex_name(u) + " not active");
      if (s.forest.parent(u) != v)
        audit.flag("advanced vertex " + vertex_name(u) + " not attached to the head");
      const auto memo = oracle.layer1_memo({u, v});
      if (!memo || !*memo) audit.flag("forest edge " + vertex_name(u) + "-" + vertex_name(v) + " lacks a positive reveal");
      break;
    }
    case StepKind::Retreat: {
      const Vertex v = s.last_popped;
      if (v == Forest::npos || s.label[v] != VertexState::Processed) {
        audit.flag("retreat did not mark the head processed");
        break;
      }
      for (const Vertex u : g.neighbors(v)) {
        if (s.label[u] != VertexState::Unprocessed) continue;
        const auto memo = oracle.layer1_memo({v, u});
        if (!memo) {
          audit.flag("retired " + vertex_name(v) + " with unqueried unprocessed neighbor " + vertex_name(u));
        } else if (*memo) {
          audit.flag("retired " + vertex_name(v) + " despite positive edge to " + vertex_name(u));
        }
      }
      break;
    }
  }
}

}  // namespace

StepKind dfs_step(DfsState& s, const Graph& g, EdgeOracle& oracle, std::uint32_t k) {
  if (k == 0) throw input_error("block size k must be at least 1");
  if (s.failed) throw state_error("dfs_step on a failed run");
  if (s.active.empty() && s.unprocessed == 0) throw state_error("dfs_step on a finished run");
  ++s.steps;

  if (s.active.empty()) {
    while (s.label[s.scan_from] != VertexState::Unprocessed) ++s.scan_from;
    const Vertex v = s.scan_from;
    s.label[v] = VertexState::Active;
    s.pos_in_active[v] = 0;
    s.active.push_back(v);
    --s.unprocessed;
    return StepKind::Restart;
  }

  const Vertex v = s.active.back();
  const std::uint32_t block = static_cast<std::uint32_t>(s.pops / k) + 1;
  const auto nbrs = g.neighbors(v);
  while (s.cursor[v] < nbrs.size()) {
    const Vertex u = nbrs[s.cursor[v]];
    ++s.cursor[v];
    if (s.label[u] != VertexState::Unprocessed) continue;
    if (oracle.query_layer1({v, u}, block)) {
      s.label[u] = VertexState::Active;
      s.pos_in_active[u] = static_cast<std::uint32_t>(s.active.size());
      s.active.push_back(u);
      s.forest.set_parent(u, v);
      --s.unprocessed;
      return StepKind::Advance;
    }
  }

  s.active.pop_back();
  s.label[v] = VertexState::Processed;
  s.last_popped = v;
  ++s.pops;
  return StepKind::Retreat;
}

BlockVerdict classify_block(std::span<const std::uint8_t> outcomes, std::uint32_t k,
                            double d, double epsilon) {
  const double dk = d * static_cast<double>(k);
  const auto s_lo = static_cast<std::uint64_t>(std::ceil(dk / 2.0));
  const std::uint64_t s_hi =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(dk)), outcomes.size());
  std::uint64_t y = 0;
  for (std::uint64_t i = 1; i <= s_hi; ++i) {
    y += outcomes[i - 1];
    if (i < s_lo) continue;
    if (static_cast<double>(y) < (1.0 + epsilon) * static_cast<double>(i) / d)
      return BlockVerdict::Bad;
  }
  return BlockVerdict::Good;
}

std::optional<SafeEvent> maybe_create_safe(DfsState& s,
                                           std::span<const BlockRecord> blocks,
                                           std::uint32_t k) {
  const auto j = static_cast<std::uint32_t>(blocks.size());
  const std::uint32_t span = 2 * k;
  if (j == 0 || j % span != 0) return std::nullopt;
  for (std::uint32_t i = j - span; i < j; ++i)
    if (blocks[i].verdict != BlockVerdict::Good) return std::nullopt;
  if (s.active.empty()) return std::nullopt;

  const Vertex x = blocks[j - k - 1].first_processed;

  // Forest distances from x across parent and child links.
  std::vector<std::uint32_t> dist(s.label.size(), std::numeric_limits<std::uint32_t>::max());
  std::vector<Vertex> queue{x};
  dist[x] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex w = queue[head];
    const auto visit = [&](Vertex c) {
      if (c != Forest::npos && dist[c] == std::numeric_limits<std::uint32_t>::max()) {
        dist[c] = dist[w] + 1;
        queue.push_back(c);
      }
    };
    visit(s.forest.parent(w));
    for (const Vertex c : s.forest.children(w)) visit(c);
  }

  // Scan in push order; strict improvement keeps the earliest on ties, and an
  // unreachable anchor falls back to the stack bottom.
  Vertex y = s.active.front();
  std::uint32_t best = dist[y];
  for (const Vertex a : s.active) {
    if (dist[a] < best) {
      best = dist[a];
      y = a;
    }
  }

  s.safe.push_back(y);
  s.ever_safe[y] = 1;
  return SafeEvent{SafeEvent::Kind::Create, j, x, y};
}

RollbackResult handle_bad_block(DfsState& s) {
  RollbackResult res;
  if (s.safe.empty() || s.label[s.safe.back()] != VertexState::Active) {
    s.failed = true;
    res.failed = true;
    return res;
  }
  const Vertex y = s.safe.back();
  s.safe.pop_back();
  res.target = y;

  const std::uint32_t pos = s.pos_in_active[y];
  for (std::size_t i = pos + 1; i < s.active.size(); ++i) {
    s.label[s.active[i]] = VertexState::Trashed;
    res.trashed.push_back(s.active[i]);
  }
  s.active.resize(pos + 1);

  // Sweep the processed subtrees hanging off the trashed tail.
  std::vector<Vertex> walk(res.trashed);
  while (!walk.empty()) {
    const Vertex w = walk.back();
    walk.pop_back();
    for (const Vertex c : s.forest.children(w)) {
      if (s.label[c] == VertexState::Processed) {
        s.label[c] = VertexState::Trashed;
        res.trashed.push_back(c);
        walk.push_back(c);
      }
    }
  }
  return res;
}

void audit_state(const DfsState& s, const Graph& g, const EdgeOracle& oracle,
                 RunAudit& audit) {
  ++audit.full_audits;
  const Vertex n = g.vertex_count();

  std::uint64_t active_count = 0;
  std::uint64_t unprocessed_count = 0;
  for (Vertex v = 0; v < n; ++v) {
    if (s.label[v] == VertexState::Active) ++active_count;
    if (s.label[v] == VertexState::Unprocessed) ++unprocessed_count;
  }
  if (active_count != s.active.size())
    audit.flag("active label count " + std::to_string(active_count) + " != stack size " +
               std::to_string(s.active.size()));
  if (unprocessed_count != s.unprocessed)
    audit.flag("unprocessed count drifted: " + std::to_string(unprocessed_count) + " vs " +
               std::to_string(s.unprocessed));

  for (std::size_t i = 0; i < s.active.size(); ++i) {
    const Vertex v = s.active[i];
    if (s.label[v] != VertexState::Active) {
      audit.flag("stack vertex " + vertex_name(v) + " not labeled active");
      continue;
    }
    if (s.pos_in_active[v] != i)
      audit.flag("stack vertex " + vertex_name(v) + " has stale position");
    if (i == 0) {
      if (!s.forest.is_root(v)) audit.flag("stack bottom " + vertex_name(v) + " has a parent");
    } else if (s.forest.parent(v) != s.active[i - 1]) {
      audit.flag("stack vertex " + vertex_name(v) + " breaks the forest path");
    }
  }

  for (const Vertex y : s.safe)
    if (!s.ever_safe[y]) audit.flag("checkpoint " + vertex_name(y) + " missing ever-safe mark");

  try {
    s.forest.validate();
  } catch (const error& e) {
    audit.flag(std::string("forest validation: ") + e.what());
  }

  // Single pass over graph edges: reveal/forest agreement, the frontier
  // emptiness of retired vertices, and separation of the trash.
  for (const auto& [u, v] : g.edge_list()) {
    const auto memo = oracle.layer1_memo({u, v});
    const bool revealed_open = memo.has_value() && *memo;
    const bool in_forest = s.forest.edge_between(u, v);
    if (revealed_open != in_forest)
      audit.flag("edge " + vertex_name(u) + "-" + vertex_name(v) +
                 (in_forest ? " in forest without a positive reveal"
                            : " revealed open but outside the forest"));
    const bool wu_pair =
        (s.label[u] == VertexState::Processed && s.label[v] == VertexState::Unprocessed) ||
        (s.label[v] == VertexState::Processed && s.label[u] == VertexState::Unprocessed);
    if (wu_pair && (!memo.has_value() || *memo))
      audit.flag("processed-unprocessed edge " + vertex_name(u) + "-" + vertex_name(v) +
                 " not revealed closed");
    if (in_forest) {
      const bool tu = s.label[u] == VertexState::Trashed;
      const bool tv = s.label[v] == VertexState::Trashed;
      if (tu != tv) {
        const Vertex other = tu ? v : u;
        if (!s.ever_safe[other])
          audit.flag("trash boundary at " + vertex_name(other) + " was never a checkpoint");
      }
    }
  }

  if (audit.prev_trashed.size() == static_cast<std::size_t>(n)) {
    for (Vertex v = 0; v < n; ++v)
      if (audit.prev_trashed[v] && s.label[v] != VertexState::Trashed)
        audit.flag("vertex " + vertex_name(v) + " left the trash");
  }
  audit.prev_trashed.assign(n, 0);
  for (Vertex v = 0; v < n; ++v)
    if (s.label[v] == VertexState::Trashed) audit.prev_trashed[v] = 1;
}

std::vector<std::uint32_t> DfsRun::z_trace() const {
  std::vector<std::uint32_t> z;
  std::uint32_t bad = 0;
  for (const BlockRecord& b : blocks) {
    if (b.verdict == BlockVerdict::Incomplete) break;
    if (b.verdict == BlockVerdict::Bad) ++bad;
    z.push_back(bad);
  }
  return z;
}

DfsRun run_dfs(const Graph& g, const ExperimentConfig& cfg, EdgeOracle& oracle,
               RunAudit* audit) {
  const Vertex n = g.vertex_count();
  if (n > 0 && n < cfg.k)
    throw input_error("graph has fewer vertices than the block size");

  DfsState s(g);
  const std::uint64_t budget = cfg.budget_for(g);
  DfsRun run;
  run.n = n;
  run.trial_seed = oracle.seed();

  Vertex pending_first = Forest::npos;
  std::uint32_t positives_acc = 0;

  while (!s.failed && !(s.active.empty() && s.unprocessed == 0)) {
    if (s.steps >= budget) {
      run.truncated = true;
      break;
    }
    const StepKind kind = dfs_step(s, g, oracle, cfg.k);
    if (audit) audit_step(s, g, oracle, kind, *audit);
    if (kind != StepKind::Retreat) continue;
    if (pending_first == Forest::npos) pending_first = s.last_popped;
    if (s.pops % cfg.k != 0) continue;

    const auto index = static_cast<std::uint32_t>(s.pops / cfg.k);
    BlockRecord rec;
    rec.index = index;
    rec.first_processed = pending_first;
    rec.last_processed = s.last_popped;
    rec.boundary_step = s.steps;
    rec.active_size = static_cast<std::uint32_t>(s.active.size());
    const auto outcomes = oracle.block_outcomes(index);
    rec.outcomes.assign(outcomes.begin(), outcomes.end());
    positives_acc = 0;
    for (const std::uint8_t o : rec.outcomes) positives_acc += o;
    rec.positives = positives_acc;
    rec.verdict = classify_block(rec.outcomes, cfg.k, cfg.d, cfg.epsilon);
    run.blocks.push_back(std::move(rec));
    pending_first = Forest::npos;

    if (run.blocks.back().verdict == BlockVerdict::Bad) {
      RollbackResult rb = handle_bad_block(s);
      if (rb.failed) {
        run.failed = true;
        run.fail_block = index;
      } else {
        run.safe_events.push_back({SafeEvent::Kind::Consume, index, Forest::npos, rb.target});
        run.rollbacks.push_back({index, rb.target, std::move(rb.trashed)});
      }
    } else if (auto ev = maybe_create_safe(s, run.blocks, cfg.k)) {
      run.safe_events.push_back(*ev);
    }
    run.blocks.back().safe_size_after = static_cast<std::uint32_t>(s.safe.size());
    if (audit && audit->deep) audit_state(s, g, oracle, *audit);
  }

  // Trailing partial block: pops or fresh draws past the last boundary.
  const auto tail_index = static_cast<std::uint32_t>(s.pops / cfg.k) + 1;
  const auto tail_outcomes = oracle.block_outcomes(tail_index);
  if (s.pops % cfg.k != 0 || !tail_outcomes.empty()) {
    BlockRecord rec;
    rec.index = tail_index;
    rec.first_processed = pending_first;
    rec.last_processed = (s.pops % cfg.k != 0) ? s.last_popped : Forest::npos;
    rec.boundary_step = s.steps;
    rec.active_size = static_cast<std::uint32_t>(s.active.size());
    rec.safe_size_after = static_cast<std::uint32_t>(s.safe.size());
    rec.outcomes.assign(tail_outcomes.begin(), tail_outcomes.end());
    rec.positives = 0;
    for (const std::uint8_t o : rec.outcomes) rec.positives += o;
    rec.verdict = BlockVerdict::Incomplete;
    run.blocks.push_back(std::move(rec));
  }

  if (audit && audit->deep) audit_state(s, g, oracle, *audit);

  run.labels = std::move(s.label);
  run.active = std::move(s.active);
  run.safe = std::move(s.safe);
  run.forest = std::move(s.forest);
  run.failed = s.failed;
  run.steps = s.steps;
  run.processed = s.pops;
  run.layer1_queries = oracle.layer1_queries();
  run.layer2_queries = oracle.layer2_queries();
  return run;
}

std::optional<std::size_t> rho(const DfsRun& run, Vertex x, Vertex y) {
  if (x >= run.n || y >= run.n) throw input_error("rho endpoint out of range");
  const auto path = run.forest.path(x, y);
  if (!path) return std::nullopt;
  return path->size() - 1;
}

const std::vector<LongEdge>& collect_long_edges(DfsRun& run, const Graph& g,
                                                const ExperimentConfig& cfg) {
  if (run.long_edges_computed) return run.long_edges;
  if (g.vertex_count() != run.n) throw input_error("graph does not match the run");
  const double threshold = cfg.long_edge_threshold();
  const ForestIndex index(run.forest);
  for (const auto& [u, v] : g.edge_list()) {
    const auto dist = index.distance(u, v);
    if (dist && static_cast<double>(*dist) >= threshold)
      run.long_edges.push_back({u, v, *dist});
  }
  std::sort(run.long_edges.begin(), run.long_edges.end(),
            [](const LongEdge& a, const LongEdge& b) {
              if (a.rho != b.rho) return a.rho > b.rho;
              if (a.u != b.u) return a.u < b.u;
              return a.v < b.v;
            });
  run.long_edges_computed = true;
  return run.long_edges;
}

std::optional<std::vector<Vertex>> extract_cycle(DfsRun& run, const Graph& g,
                                                 EdgeOracle& oracle,
                                                 const ExperimentConfig& cfg) {
  collect_long_edges(run, g, cfg);
  for (const LongEdge& le : run.long_edges) {
    if (le.rho < 2) continue;  // closing a single forest edge is not a cycle
    const Edge e{le.u, le.v};
    const auto memo = oracle.layer1_memo(e);
    const bool present = (memo.has_value() && *memo) || oracle.query_layer2(e);
    if (!present) continue;
    auto path = run.forest.path(le.u, le.v);
    if (!path || path->size() != le.rho + 1)
      throw engine_error("long-edge endpoints lost their forest path");
    run.layer2_queries = oracle.layer2_queries();
    run.cycle = std::move(*path);
    return run.cycle;
  }
  run.layer2_queries = oracle.layer2_queries();
  return std::nullopt;
}

std::vector<Vertex> baseline_dfs_path(const Graph& g, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw input_error("probability must lie in [0, 1]");
  const Vertex n = g.vertex_count();
  std::vector<std::uint8_t> state(n, 0);  // 0 fresh, 1 active, 2 done
  std::vector<std::uint32_t> cursor(n, 0);
  std::vector<Vertex> active;
  std::vector<Vertex> best;
  Vertex scan_from = 0;
  std::uint64_t remaining = n;

  const auto open = [&](Vertex a, Vertex b) {
    const Edge e = a < b ? Edge{a, b} : Edge{b, a};
    return draw::bernoulli(p, seed, StreamClass::Baseline, g.edge_id(e.u, e.v), 0);
  };

  while (remaining > 0 || !active.empty()) {
    if (active.empty()) {
      while (state[scan_from] != 0) ++scan_from;
      state[scan_from] = 1;
      active.push_back(scan_from);
      --remaining;
      if (active.size() > best.size()) best = active;
      continue;
    }
    const Vertex v = active.back();
    const auto nbrs = g.neighbors(v);
    bool advanced = false;
    while (cursor[v] < nbrs.size()) {
      const Vertex u = nbrs[cursor[v]];
      ++cursor[v];
      if (state[u] != 0) continue;
      if (open(v, u)) {
        state[u] = 1;
        active.push_back(u);
        --remaining;
        if (active.size() > best.size()) best = active;
        advanced = true;
        break;
      }
    }
    if (!advanced) {
      state[v] = 2;
      active.pop_back();
    }
  }
  return best;
}

}  // namespace percolade
