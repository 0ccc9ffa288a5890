#include "percolade/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "percolade/errors.hpp"
#include "percolade/forest.hpp"
#include "percolade/rng.hpp"

namespace percolade {

double chernoff_bound(double mu, double t) {
  if (!(mu > 0.0)) throw input_error("chernoff bound needs a positive mean");
  if (!(t >= 0.0) || t > mu / 2.0)
    throw input_error("chernoff bound is valid only for 0 <= t <= mu/2");
  return std::min(1.0, 2.0 * std::exp(-(t * t) / (3.0 * mu)));
}

namespace {

BoundValue make_bound(double raw) {
  BoundValue b;
  b.raw = raw;
  b.value = std::clamp(raw, 0.0, 1.0);
  b.vacuous = !(raw > 0.0);
  return b;
}

}  // namespace

BoundReport theorem_bounds(const ExperimentConfig& cfg) {
  const double k = static_cast<double>(cfg.k);
  const double d = cfg.d;
  const double e = cfg.epsilon;
  BoundReport r;
  r.target_cycle_length = e * e * k * d / 100.0;
  r.long_edge_threshold = cfg.long_edge_threshold();
  r.success_probability = make_bound(1.0 - 2.0 * std::exp(-e * e * k / (200.0 * d)));
  r.block_good_probability = make_bound(1.0 - d * k * std::exp(-e * e * k / 12.0));
  r.z_decay_rate = std::exp(-cfg.lambda() * k / 2.0);
  r.z_decay_probability = make_bound(1.0 - std::exp(-cfg.lambda() * k / 8.0));
  r.sprinkling_probability = make_bound(1.0 - std::exp(-e * e * k / d));
  r.theorem_applies = cfg.theorem_valid();
  return r;
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t total) {
  if (total == 0) return {0.0, 1.0};
  if (successes > total) throw input_error("successes exceed total");
  const double z = 1.959963984540054;
  const double n = static_cast<double>(total);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = phat + z2 / (2.0 * n);
  const double margin = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, (center - margin) / denom), std::min(1.0, (center + margin) / denom)};
}

TrialOutput run_trial(const Graph& g, const ExperimentConfig& cfg, std::uint32_t trial,
                      bool keep_run, RunAudit* audit) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t sub = draw::value64(cfg.seed, StreamClass::TrialSeed, trial, 0);
  EdgeOracle oracle(g, cfg.split, sub);
  DfsRun run = run_dfs(g, cfg, oracle, audit);
  collect_long_edges(run, g, cfg);
  if (!run.failed) extract_cycle(run, g, oracle, cfg);

  if (run.cycle) {
    // Re-check the cycle edge by edge against the oracle's memos.
    const auto& c = *run.cycle;
    if (c.size() < 3) throw engine_error("extracted cycle too short");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const Vertex a = c[i];
      const Vertex b = c[(i + 1) % c.size()];
      if (!g.has_edge(a, b)) throw engine_error("cycle uses a non-edge");
      const Edge e = a < b ? Edge{a, b} : Edge{b, a};
      const auto m1 = oracle.layer1_memo(e);
      const auto m2 = oracle.layer2_memo(e);
      const bool open = (m1.has_value() && *m1) || (m2.has_value() && *m2);
      if (!open) throw engine_error("cycle uses an edge with no positive reveal");
    }
  }

  TrialResult res;
  res.trial = trial;
  res.seed = sub;
  res.cycle_found = run.cycle.has_value();
  res.cycle_len = run.cycle ? run.cycle->size() : 0;
  res.long_edges = run.long_edges.size();
  const auto z = run.z_trace();
  res.bad_blocks = z.empty() ? 0 : z.back();
  res.failed = run.failed;
  res.truncated = run.truncated;
  res.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  TrialOutput out;
  out.result = res;
  if (keep_run) out.run = std::move(run);
  return out;
}

ExperimentStats summarize_trials(std::span<const TrialResult> trials) {
  ExperimentStats st;
  st.trials = static_cast<std::uint32_t>(trials.size());
  double len_sum = 0.0;
  for (const TrialResult& t : trials) {
    st.found += t.cycle_found ? 1 : 0;
    st.failed += t.failed ? 1 : 0;
    st.truncated += t.truncated ? 1 : 0;
    st.mean_long_edges += static_cast<double>(t.long_edges);
    st.total_millis += t.millis;
    if (t.cycle_found) len_sum += static_cast<double>(t.cycle_len);
  }
  if (st.trials > 0) {
    st.find_rate = static_cast<double>(st.found) / st.trials;
    st.mean_long_edges /= st.trials;
  }
  std::tie(st.wilson_low, st.wilson_high) = wilson_interval(st.found, st.trials);
  if (st.found > 0) {
    st.mean_cycle_length = len_sum / st.found;
    if (st.found > 1) {
      double ss = 0.0;
      for (const TrialResult& t : trials)
        if (t.cycle_found) {
          const double d = static_cast<double>(t.cycle_len) - st.mean_cycle_length;
          ss += d * d;
        }
      st.stddev_cycle_length = std::sqrt(ss / (st.found - 1));
      st.se_cycle_length = st.stddev_cycle_length / std::sqrt(static_cast<double>(st.found));
    }
  }
  return st;
}

ExperimentResult run_experiment(const Graph& g, const ExperimentConfig& cfg,
                                unsigned threads, bool keep_runs) {
  ExperimentResult out;
  out.trials.resize(cfg.trials);
  if (keep_runs) out.runs.resize(cfg.trials);

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, cfg.trials));
  std::atomic<std::uint32_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const auto worker = [&]() {
    while (true) {
      const std::uint32_t i = next.fetch_add(1);
      if (i >= cfg.trials) return;
      try {
        TrialOutput t = run_trial(g, cfg, i, keep_runs);
        out.trials[i] = t.result;
        if (keep_runs) out.runs[i] = std::move(*t.run);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  out.stats = summarize_trials(out.trials);
  return out;
}

namespace {

std::string edge_name(const Edge& e) {
  return std::to_string(e.u) + "-" + std::to_string(e.v);
}

// Memo lookup over the run's query snapshot (kept in ascending edge order).
std::optional<bool> snapshot_lookup(const std::vector<std::pair<Edge, bool>>& snap,
                                    Vertex u, Vertex v) {
  const Edge key = u < v ? Edge{u, v} : Edge{v, u};
  auto it = std::lower_bound(snap.begin(), snap.end(), key,
                             [](const auto& entry, const Edge& e) { return entry.first < e; });
  if (it == snap.end() || !(it->first == key)) return std::nullopt;
  return it->second;
}

}  // namespace

InvariantReport verify_run_invariants(const DfsRun& run, const Graph& g,
                                      const ExperimentConfig& cfg) {
  InvariantReport rep;
  const auto hard = [&rep](std::string msg) { rep.hard.push_back(std::move(msg)); };
  const auto soft = [&rep](std::string msg) { rep.soft.push_back(std::move(msg)); };

  const Vertex n = g.vertex_count();
  ++rep.hard_checks;
  if (run.n != n || run.labels.size() != n) {
    hard("run does not match the graph: n=" + std::to_string(run.n) + " vs " + std::to_string(n));
    return rep;
  }

  // Query snapshots: sorted, in-graph, and consistent with the forest.
  ++rep.hard_checks;
  for (std::size_t i = 0; i < run.layer1_queries.size(); ++i) {
    const auto& [e, open] = run.layer1_queries[i];
    if (!g.has_edge(e.u, e.v)) hard("layer-1 query on non-edge " + edge_name(e));
    if (i > 0 && !(run.layer1_queries[i - 1].first < e))
      hard("layer-1 snapshot out of order at " + edge_name(e));
  }
  ++rep.hard_checks;
  for (std::size_t i = 0; i < run.layer2_queries.size(); ++i) {
    const auto& [e, open] = run.layer2_queries[i];
    if (!g.has_edge(e.u, e.v)) hard("layer-2 query on non-edge " + edge_name(e));
    if (i > 0 && !(run.layer2_queries[i - 1].first < e))
      hard("layer-2 snapshot out of order at " + edge_name(e));
  }

  // Label partition and the active path.
  std::uint64_t active_count = 0;
  for (Vertex v = 0; v < n; ++v)
    if (run.labels[v] == VertexState::Active) ++active_count;
  ++rep.hard_checks;
  if (active_count != run.active.size())
    hard("active labels (" + std::to_string(active_count) + ") disagree with the stack (" +
         std::to_string(run.active.size()) + ")");
  ++rep.hard_checks;
  for (std::size_t i = 0; i < run.active.size(); ++i) {
    const Vertex v = run.active[i];
    if (v >= n || run.labels[v] != VertexState::Active) {
      hard("stack entry " + std::to_string(v) + " not labeled active");
      continue;
    }
    if (i == 0) {
      if (!run.forest.is_root(v)) hard("stack bottom " + std::to_string(v) + " has a parent");
    } else if (run.forest.parent(v) != run.active[i - 1]) {
      hard("stack entry " + std::to_string(v) + " does not extend its predecessor");
    }
  }

  bool forest_ok = true;
  ++rep.hard_checks;
  try {
    run.forest.validate();
  } catch (const error& e) {
    forest_ok = false;
    hard(std::string("forest: ") + e.what());
  }

  // Forest edges are exactly the positive layer-1 reveals.
  std::uint64_t positive_l1 = 0;
  ++rep.hard_checks;
  for (const auto& [e, open] : run.layer1_queries) {
    if (open) {
      ++positive_l1;
      if (!run.forest.edge_between(e.u, e.v))
        hard("positive reveal " + edge_name(e) + " missing from the forest");
    } else if (run.forest.edge_between(e.u, e.v)) {
      hard("forest edge " + edge_name(e) + " was revealed closed");
    }
  }
  ++rep.hard_checks;
  if (positive_l1 != run.forest.edges().size())
    hard("forest has " + std::to_string(run.forest.edges().size()) + " edges but " +
         std::to_string(positive_l1) + " positive reveals");

  // Ever-safe vertices, from checkpoint creation events.
  std::vector<std::uint8_t> ever_safe(n, 0);
  std::vector<Vertex> checkpoints;
  for (const SafeEvent& ev : run.safe_events) {
    if (ev.vertex >= n) {
      hard("checkpoint event on out-of-range vertex");
      continue;
    }
    if (ev.kind == SafeEvent::Kind::Create && !ever_safe[ev.vertex]) {
      ever_safe[ev.vertex] = 1;
      checkpoints.push_back(ev.vertex);
    }
  }

  // One pass over graph edges: frontier emptiness and trash separation.
  ++rep.hard_checks;
  for (const auto& [u, v] : g.edge_list()) {
    const auto m1 = snapshot_lookup(run.layer1_queries, u, v);
    const bool wu_pair =
        (run.labels[u] == VertexState::Processed && run.labels[v] == VertexState::Unprocessed) ||
        (run.labels[v] == VertexState::Processed && run.labels[u] == VertexState::Unprocessed);
    if (wu_pair && (!m1.has_value() || *m1))
      hard("processed-unprocessed edge " + std::to_string(u) + "-" + std::to_string(v) +
           " not revealed closed");
    if (run.forest.edge_between(u, v)) {
      const bool tu = run.labels[u] == VertexState::Trashed;
      const bool tv = run.labels[v] == VertexState::Trashed;
      if (tu != tv) {
        const Vertex other = tu ? v : u;
        if (!ever_safe[other])
          hard("trash boundary at vertex " + std::to_string(other) + " never held a checkpoint");
      }
    }
  }

  // Trashed labels are exactly the union of rollback casualties.
  std::vector<std::uint8_t> trashed_seen(n, 0);
  ++rep.hard_checks;
  for (const RollbackEvent& rb : run.rollbacks)
    for (const Vertex v : rb.trashed) {
      if (v >= n) {
        hard("rollback trashed out-of-range vertex");
        continue;
      }
      if (trashed_seen[v]) hard("vertex " + std::to_string(v) + " trashed twice");
      trashed_seen[v] = 1;
    }
  ++rep.hard_checks;
  for (Vertex v = 0; v < n; ++v) {
    const bool labeled = run.labels[v] == VertexState::Trashed;
    if (labeled != (trashed_seen[v] != 0))
      hard("trash label for vertex " + std::to_string(v) + " disagrees with rollback history");
  }

  // Block ledger: indices, verdict replay, positives, tail shape.
  std::size_t complete_count = 0;
  ++rep.hard_checks;
  for (std::size_t i = 0; i < run.blocks.size(); ++i) {
    const BlockRecord& b = run.blocks[i];
    if (b.index != i + 1) hard("block " + std::to_string(i) + " carries index " + std::to_string(b.index));
    std::uint32_t pos = 0;
    for (const std::uint8_t o : b.outcomes) pos += o;
    if (pos != b.positives)
      hard("block " + std::to_string(b.index) + " positives miscounted");
    if (b.verdict == BlockVerdict::Incomplete) {
      if (i + 1 != run.blocks.size())
        hard("incomplete block " + std::to_string(b.index) + " is not last");
      continue;
    }
    ++complete_count;
    if (classify_block(b.outcomes, cfg.k, cfg.d, cfg.epsilon) != b.verdict)
      hard("block " + std::to_string(b.index) + " verdict does not replay");
  }
  ++rep.hard_checks;
  if (complete_count != run.processed / cfg.k)
    hard("complete block count disagrees with the processed total");
  ++rep.hard_checks;
  if (run.processed > n) hard("processed count exceeds the vertex count");
  ++rep.hard_checks;
  if (run.steps < run.processed) hard("step count below the processed count");
  ++rep.hard_checks;
  if (run.truncated && run.steps != cfg.budget_for(g))
    hard("truncated run did not stop exactly at the step budget");

  // Failure bookkeeping.
  ++rep.hard_checks;
  if (run.failed) {
    if (run.fail_block == 0 || run.fail_block != complete_count)
      hard("failed run does not end at its failing block");
    else if (run.blocks[run.fail_block - 1].verdict != BlockVerdict::Bad)
      hard("failing block was not bad");
    for (const RollbackEvent& rb : run.rollbacks)
      if (rb.block == run.fail_block) hard("failing block also rolled back");
  } else if (run.fail_block != 0) {
    hard("fail block set on a run that did not fail");
  }

  // Checkpoint ladder replay against per-boundary sizes and the final stack.
  {
    std::vector<Vertex> ladder;
    std::size_t ev_at = 0;
    ++rep.hard_checks;
    for (const BlockRecord& b : run.blocks) {
      if (b.verdict == BlockVerdict::Incomplete) break;
      while (ev_at < run.safe_events.size() && run.safe_events[ev_at].block == b.index) {
        const SafeEvent& ev = run.safe_events[ev_at];
        if (ev.kind == SafeEvent::Kind::Create) {
          ladder.push_back(ev.vertex);
        } else if (ladder.empty() || ladder.back() != ev.vertex) {
          hard("checkpoint consumption at block " + std::to_string(ev.block) +
               " does not match the ladder top");
        } else {
          ladder.pop_back();
        }
        ++ev_at;
      }
      if (ladder.size() != b.safe_size_after)
        hard("checkpoint count after block " + std::to_string(b.index) + " is " +
             std::to_string(b.safe_size_after) + " but replays to " + std::to_string(ladder.size()));
    }
    if (ev_at != run.safe_events.size()) hard("checkpoint events outside any complete block");
    if (ladder != run.safe) hard("final checkpoint stack does not replay from its events");
  }

  // Rollback events pair with bad verdicts.
  ++rep.hard_checks;
  for (const RollbackEvent& rb : run.rollbacks) {
    if (rb.block == 0 || rb.block > complete_count ||
        run.blocks[rb.block - 1].verdict != BlockVerdict::Bad) {
      hard("rollback at block " + std::to_string(rb.block) + " without a bad verdict");
      continue;
    }
    if (rb.target >= n || !ever_safe[rb.target])
      hard("rollback target was never a checkpoint");
  }

  // Extracted cycle: simple, in-graph, on the forest path, closed by a
  // positively revealed long edge.
  if (run.cycle) {
    const auto& c = *run.cycle;
    ++rep.hard_checks;
    if (c.size() < 3) hard("cycle shorter than 3 vertices");
    std::vector<std::uint8_t> seen(n, 0);
    for (const Vertex v : c) {
      if (v >= n) {
        hard("cycle vertex out of range");
        continue;
      }
      if (seen[v]) hard("cycle repeats vertex " + std::to_string(v));
      seen[v] = 1;
    }
    ++rep.hard_checks;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      if (!g.has_edge(c[i], c[i + 1]))
        hard("cycle path uses non-edge " + std::to_string(c[i]) + "-" + std::to_string(c[i + 1]));
      if (!run.forest.edge_between(c[i], c[i + 1]))
        hard("cycle path leaves the forest at " + std::to_string(c[i]));
      const auto m1 = snapshot_lookup(run.layer1_queries, c[i], c[i + 1]);
      if (!m1.has_value() || !*m1)
        hard("cycle forest edge lacks a positive reveal");
    }
    ++rep.hard_checks;
    const Vertex a = c.front();
    const Vertex b = c.back();
    if (!g.has_edge(a, b)) {
      hard("cycle closing edge is not in the graph");
    } else {
      const auto m1 = snapshot_lookup(run.layer1_queries, a, b);
      const auto m2 = snapshot_lookup(run.layer2_queries, a, b);
      const bool open = (m1.has_value() && *m1) || (m2.has_value() && *m2);
      if (!open) hard("cycle closing edge has no positive reveal");
      if (static_cast<double>(c.size() - 1) < cfg.long_edge_threshold())
        hard("cycle closing edge is shorter than the long-edge threshold");
    }
    ++rep.hard_checks;
    if (run.failed) hard("failed run carries a cycle");
  }

  // Cached long-edge list replays from the final forest. Distance queries
  // need an intact forest; a corrupted one was already flagged above.
  if (run.long_edges_computed && forest_ok) {
    const ForestIndex index(run.forest);
    const double threshold = cfg.long_edge_threshold();
    std::size_t expected = 0;
    ++rep.hard_checks;
    for (const auto& [u, v] : g.edge_list()) {
      const auto dist = index.distance(u, v);
      if (dist && static_cast<double>(*dist) >= threshold) ++expected;
    }
    if (expected != run.long_edges.size())
      hard("long-edge list has " + std::to_string(run.long_edges.size()) + " entries, expected " +
           std::to_string(expected));
    for (std::size_t i = 0; i < run.long_edges.size(); ++i) {
      const LongEdge& le = run.long_edges[i];
      if (!g.has_edge(le.u, le.v)) {
        hard("long edge " + std::to_string(le.u) + "-" + std::to_string(le.v) + " is not in the graph");
        continue;
      }
      const auto dist = index.distance(le.u, le.v);
      if (!dist || *dist != le.rho)
        hard("long edge " + std::to_string(le.u) + "-" + std::to_string(le.v) + " has a stale distance");
      if (i > 0) {
        const LongEdge& prev = run.long_edges[i - 1];
        const auto key = [](const LongEdge& x) {
          return std::make_tuple(std::numeric_limits<std::size_t>::max() - x.rho, x.u, x.v);
        };
        if (!(key(prev) < key(le))) hard("long-edge list out of order");
      }
    }
  }

  // Soft expectations: hold with high probability, may fail on a given seed.
  const auto z = run.z_trace();
  const std::uint32_t two_k = 2 * cfg.k;
  ++rep.soft_checks;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const std::uint32_t boundary = static_cast<std::uint32_t>(i) + 1;
    const BlockRecord& b = run.blocks[i];
    const std::int64_t floor_term = static_cast<std::int64_t>(boundary / two_k);
    const std::int64_t lower = floor_term - 2 * static_cast<std::int64_t>(z[i]);
    if (static_cast<std::int64_t>(b.safe_size_after) < lower)
      soft("checkpoint ladder after block " + std::to_string(boundary) + " is " +
           std::to_string(b.safe_size_after) + ", below " + std::to_string(lower));
  }

  ++rep.soft_checks;
  if (forest_ok) {
    const double min_sep = cfg.gamma() * static_cast<double>(cfg.k) * static_cast<double>(cfg.k);
    const ForestIndex index(run.forest);
    for (std::size_t i = 0; i < checkpoints.size(); ++i)
      for (std::size_t j = i + 1; j < checkpoints.size(); ++j) {
        const auto dist = index.distance(checkpoints[i], checkpoints[j]);
        if (dist && static_cast<double>(*dist) < min_sep)
          soft("checkpoints " + std::to_string(checkpoints[i]) + " and " +
               std::to_string(checkpoints[j]) + " sit closer than the expected separation");
      }
  }

  ++rep.soft_checks;
  {
    const double growth = cfg.gamma() * static_cast<double>(cfg.k);
    const double window_lo = std::ceil(cfg.d * static_cast<double>(cfg.k) / 2.0);
    std::uint32_t prev_active = 0;
    for (const BlockRecord& b : run.blocks) {
      if (b.verdict == BlockVerdict::Incomplete) break;
      const bool testable =
          b.verdict == BlockVerdict::Good && static_cast<double>(b.outcomes.size()) >= window_lo;
      if (testable) {
        const double diff =
            static_cast<double>(b.active_size) - static_cast<double>(prev_active);
        if (diff < growth)
          soft("good block " + std::to_string(b.index) + " grew the active path by " +
               std::to_string(static_cast<std::int64_t>(diff)) + ", expected at least " +
               std::to_string(growth));
      }
      prev_active = b.active_size;
    }
  }

  ++rep.soft_checks;
  for (const Vertex ysafe : run.safe)
    if (ysafe >= n || run.labels[ysafe] != VertexState::Active)
      soft("checkpoint " + std::to_string(ysafe) + " is no longer on the active path");

  ++rep.soft_checks;
  if (!run.failed && !run.truncated && run.long_edges_computed && run.long_edges.empty() &&
      run.processed >= static_cast<std::uint64_t>(4) * cfg.k)
    soft("completed run found no long edges");

  return rep;
}

BlockStats empirical_block_stats(std::span<const DfsRun> runs, const ExperimentConfig& cfg) {
  BlockStats st;
  const double window_lo = std::ceil(cfg.d * static_cast<double>(cfg.k) / 2.0);
  double queries = 0.0;
  double positives = 0.0;
  for (const DfsRun& run : runs)
    for (const BlockRecord& b : run.blocks) {
      ++st.total;
      switch (b.verdict) {
        case BlockVerdict::Good:
          ++st.good;
          if (static_cast<double>(b.outcomes.size()) < window_lo) ++st.vacuous_good;
          break;
        case BlockVerdict::Bad:
          ++st.bad;
          break;
        case BlockVerdict::Incomplete:
          ++st.incomplete;
          break;
      }
      if (b.verdict != BlockVerdict::Incomplete) {
        queries += static_cast<double>(b.outcomes.size());
        positives += static_cast<double>(b.positives);
      }
    }
  const std::uint64_t complete = st.good + st.bad;
  if (complete > 0) {
    st.good_fraction = static_cast<double>(st.good) / static_cast<double>(complete);
    st.mean_queries = queries / static_cast<double>(complete);
    st.mean_positives = positives / static_cast<double>(complete);
  }
  return st;
}

}  // namespace percolade
