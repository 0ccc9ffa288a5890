#include <doctest.h>

#include <cmath>

#include "percolade/analysis.hpp"
#include "percolade/errors.hpp"
#include "percolade/generators.hpp"

#include "helpers.hpp"

using namespace percolade;

namespace {

bool same_result_ignoring_time(const TrialResult& a, const TrialResult& b) {
  return a.trial == b.trial && a.seed == b.seed && a.cycle_found == b.cycle_found &&
         a.cycle_len == b.cycle_len && a.long_edges == b.long_edges &&
         a.bad_blocks == b.bad_blocks && a.failed == b.failed && a.truncated == b.truncated;
}

}  // namespace

TEST_CASE("chernoff_bound hits the frozen value and clamps at one") {
  // mu = 12, t = 6: exponent is 36 / 36 = 1, so the bound is 2/e.
  CHECK(chernoff_bound(12.0, 6.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(chernoff_bound(100.0, 0.0) == 1.0);
  CHECK(chernoff_bound(100.0, 5.0) == 1.0);  // 2 exp(-1/12) > 1 still clamps

  // Decreasing in t across the valid range.
  double prev = 2.0;
  for (double t = 0.0; t <= 50.0; t += 2.5) {
    const double b = chernoff_bound(100.0, t);
    CHECK(b <= prev);
    prev = b;
  }
}

TEST_CASE("chernoff_bound rejects out-of-domain arguments") {
  CHECK_THROWS_AS(chernoff_bound(0.0, 0.0), input_error);
  CHECK_THROWS_AS(chernoff_bound(-3.0, 1.0), input_error);
  CHECK_THROWS_AS(chernoff_bound(10.0, -1.0), input_error);
  CHECK_THROWS_AS(chernoff_bound(10.0, 5.1), input_error);
  CHECK_NOTHROW(chernoff_bound(10.0, 5.0));
}

TEST_CASE("theorem_bounds reproduces the closed forms") {
  const ExperimentConfig cfg = ExperimentConfig::make(400, 16.0, 0.8, {}, {}, 0, 1);
  const BoundReport r = theorem_bounds(cfg);
  const double k = 400.0;
  const double d = 16.0;
  const double e = 0.8;

  CHECK(r.target_cycle_length == doctest::Approx(e * e * k * d / 100.0).epsilon(1e-12));
  CHECK(r.long_edge_threshold == doctest::Approx(e * e / 100.0 * k * d).epsilon(1e-12));
  CHECK(r.success_probability.raw ==
        doctest::Approx(1.0 - 2.0 * std::exp(-e * e * k / (200.0 * d))).epsilon(1e-12));
  CHECK(r.block_good_probability.raw ==
        doctest::Approx(1.0 - d * k * std::exp(-e * e * k / 12.0)).epsilon(1e-12));
  CHECK(r.z_decay_rate ==
        doctest::Approx(std::exp(-e * e / 24.0 * k / 2.0)).epsilon(1e-12));
  CHECK(r.z_decay_probability.raw ==
        doctest::Approx(1.0 - std::exp(-e * e / 24.0 * k / 8.0)).epsilon(1e-12));
  CHECK(r.sprinkling_probability.raw ==
        doctest::Approx(1.0 - std::exp(-e * e * k / d)).epsilon(1e-12));
  CHECK_FALSE(r.theorem_applies);  // 300 / 4 = 75 is far above eps
}

TEST_CASE("theorem_bounds marks the worked large-scale example vacuous") {
  // At eps = 0.3, d = 1e6, k = 1e3 the validity gate holds exactly, yet the
  // success bound collapses: the target is 9e5 but the probability is <= 0.
  ExperimentConfig cfg;
  cfg.k = 1000;
  cfg.d = 1e6;
  cfg.epsilon = 0.3;
  const BoundReport r = theorem_bounds(cfg);
  CHECK(r.theorem_applies);
  CHECK(r.target_cycle_length == doctest::Approx(9e5).epsilon(1e-12));
  CHECK(r.success_probability.raw < 0.0);
  CHECK(r.success_probability.vacuous);
  CHECK(r.success_probability.value == 0.0);
}

TEST_CASE("wilson_interval brackets the proportion") {
  const auto empty = wilson_interval(0, 0);
  CHECK(empty.first == 0.0);
  CHECK(empty.second == 1.0);

  // Independent recomputation at 8 of 10.
  const double z = 1.959963984540054;
  const double phat = 0.8;
  const double n = 10.0;
  const double denom = 1.0 + z * z / n;
  const double center = phat + z * z / (2.0 * n);
  const double margin = z * std::sqrt(phat * 0.2 / n + z * z / (4.0 * n * n));
  const auto got = wilson_interval(8, 10);
  CHECK(got.first == doctest::Approx((center - margin) / denom).epsilon(1e-12));
  CHECK(got.second == doctest::Approx((center + margin) / denom).epsilon(1e-12));
  CHECK(got.first < phat);
  CHECK(got.second > phat);

  const auto all = wilson_interval(10, 10);
  CHECK(all.second == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(all.first > 0.5);
  const auto none = wilson_interval(0, 10);
  CHECK(none.first == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(wilson_interval(11, 10), input_error);
}

TEST_CASE("run_trial derives its sub-seed from the trial index") {
  const Graph g = gen_complete(12);
  const ExperimentConfig cfg = ExperimentConfig::make(3, 2.0, 0.5, 1.0, {}, 99, 4);

  const TrialOutput t2 = run_trial(g, cfg, 2, true);
  CHECK(t2.result.seed == draw::value64(99, StreamClass::TrialSeed, 2, 0));
  REQUIRE(t2.run.has_value());
  CHECK(t2.run->trial_seed == t2.result.seed);

  CHECK(t2.result.cycle_found);
  CHECK(t2.result.cycle_len == 12);
  CHECK_FALSE(t2.result.failed);
  CHECK(t2.result.bad_blocks == 0);

  // Replays are exact.
  const TrialOutput again = run_trial(g, cfg, 2, false);
  CHECK(same_result_ignoring_time(t2.result, again.result));
  CHECK_FALSE(again.run.has_value());
}

TEST_CASE("run_experiment is invariant to the thread count and trial total") {
  const Graph g = gen_random_regular(40, 6, 13);
  const ExperimentConfig cfg8 = ExperimentConfig::make(2, 3.0, 0.5, 0.5, {}, 31, 8);

  const ExperimentResult serial = run_experiment(g, cfg8, 1);
  const ExperimentResult threaded = run_experiment(g, cfg8, 4);
  REQUIRE(serial.trials.size() == 8);
  REQUIRE(threaded.trials.size() == 8);
  for (std::size_t i = 0; i < 8; ++i)
    CHECK(same_result_ignoring_time(serial.trials[i], threaded.trials[i]));

  // Growing the trial count only appends: earlier trials are untouched.
  ExperimentConfig cfg4 = cfg8;
  cfg4.trials = 4;
  const ExperimentResult shorter = run_experiment(g, cfg4, 2);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(same_result_ignoring_time(shorter.trials[i], serial.trials[i]));
}

TEST_CASE("run_experiment surfaces worker exceptions") {
  const Graph g = testutil::path_graph(3);
  ExperimentConfig cfg = ExperimentConfig::make(8, 2.0, 0.5, 1.0, {}, 0, 3);
  CHECK_THROWS_AS(run_experiment(g, cfg, 2), input_error);  // k exceeds n
}

TEST_CASE("summarize_trials computes the cycle statistics over finders only") {
  std::vector<TrialResult> trials(3);
  trials[0].cycle_found = true;
  trials[0].cycle_len = 10;
  trials[0].long_edges = 6;
  trials[0].millis = 1.5;
  trials[1].cycle_found = false;
  trials[1].failed = true;
  trials[1].long_edges = 0;
  trials[1].millis = 0.5;
  trials[2].cycle_found = true;
  trials[2].cycle_len = 14;
  trials[2].long_edges = 3;
  trials[2].millis = 2.0;

  const ExperimentStats st = summarize_trials(trials);
  CHECK(st.trials == 3);
  CHECK(st.found == 2);
  CHECK(st.failed == 1);
  CHECK(st.truncated == 0);
  CHECK(st.find_rate == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(st.mean_cycle_length == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(st.stddev_cycle_length == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
  CHECK(st.se_cycle_length == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(st.mean_long_edges == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(st.total_millis == doctest::Approx(4.0).epsilon(1e-12));

  const auto [lo, hi] = wilson_interval(2, 3);
  CHECK(st.wilson_low == doctest::Approx(lo).epsilon(1e-12));
  CHECK(st.wilson_high == doctest::Approx(hi).epsilon(1e-12));
}

TEST_CASE("verify_run_invariants passes fresh runs of every flavor") {
  SUBCASE("completed run with a cycle") {
    const Graph g = gen_complete(12);
    const ExperimentConfig cfg = ExperimentConfig::make(3, 2.0, 0.5, 1.0, {}, 5, 1);
    const TrialOutput t = run_trial(g, cfg, 0, true);
    REQUIRE(t.run.has_value());
    const InvariantReport rep = verify_run_invariants(*t.run, g, cfg);
    CHECK(rep.ok());
    CHECK(rep.hard.empty());
    CHECK(rep.hard_checks > 10);
  }

  SUBCASE("failed run") {
    const Graph g = gen_complete(6);
    const ExperimentConfig cfg = ExperimentConfig::make(1, 2.0, 0.5, 0.0, {}, 5, 1);
    const TrialOutput t = run_trial(g, cfg, 0, true);
    REQUIRE(t.run.has_value());
    CHECK(t.run->failed);
    CHECK(verify_run_invariants(*t.run, g, cfg).ok());
  }

  SUBCASE("truncated run") {
    const Graph g = gen_complete(10);
    const ExperimentConfig cfg = ExperimentConfig::make(2, 2.0, 0.5, 1.0, {}, 5, 1, 7);
    const TrialOutput t = run_trial(g, cfg, 0, true);
    REQUIRE(t.run.has_value());
    CHECK(t.run->truncated);
    CHECK(verify_run_invariants(*t.run, g, cfg).ok());
  }

  SUBCASE("mid-probability percolated runs across seeds") {
    const Graph g = gen_random_regular(64, 6, 4);
    for (std::uint64_t s = 0; s < 6; ++s) {
      ExperimentConfig cfg = ExperimentConfig::make(2, 3.0, 0.5, 0.4, {}, s, 1);
      const TrialOutput t = run_trial(g, cfg, 0, true);
      REQUIRE(t.run.has_value());
      const InvariantReport rep = verify_run_invariants(*t.run, g, cfg);
      CHECK(rep.ok());
    }
  }
}

TEST_CASE("verify_run_invariants catches tampering") {
  const Graph g = gen_complete(12);
  const ExperimentConfig cfg = ExperimentConfig::make(3, 2.0, 0.5, 1.0, {}, 5, 1);
  const TrialOutput base = run_trial(g, cfg, 0, true);
  REQUIRE(base.run.has_value());
  REQUIRE(verify_run_invariants(*base.run, g, cfg).ok());

  SUBCASE("an invented forest edge") {
    DfsRun run = *base.run;
    // Vertex 0 is the single root: give it a parent that was never revealed.
    run.forest.set_parent(0, 5);
    CHECK_FALSE(verify_run_invariants(run, g, cfg).ok());
  }

  SUBCASE("a flipped block verdict") {
    DfsRun run = *base.run;
    REQUIRE_FALSE(run.blocks.empty());
    run.blocks[0].verdict = BlockVerdict::Bad;
    CHECK_FALSE(verify_run_invariants(run, g, cfg).ok());
  }

  SUBCASE("a miscounted processed total") {
    DfsRun run = *base.run;
    run.processed += cfg.k;
    CHECK_FALSE(verify_run_invariants(run, g, cfg).ok());
  }

  SUBCASE("a false truncation flag") {
    DfsRun run = *base.run;
    run.truncated = true;
    CHECK_FALSE(verify_run_invariants(run, g, cfg).ok());
  }

  SUBCASE("a fabricated cycle vertex") {
    DfsRun run = *base.run;
    REQUIRE(run.cycle.has_value());
    run.cycle->push_back(run.cycle->front());
    CHECK_FALSE(verify_run_invariants(run, g, cfg).ok());
  }

  SUBCASE("a stale long-edge distance") {
    DfsRun run = *base.run;
    REQUIRE_FALSE(run.long_edges.empty());
    run.long_edges[0].rho += 1;
    CHECK_FALSE(verify_run_invariants(run, g, cfg).ok());
  }

  SUBCASE("a checkpoint stack that does not replay") {
    DfsRun run = *base.run;
    run.safe.push_back(0);
    CHECK_FALSE(verify_run_invariants(run, g, cfg).ok());
  }

  SUBCASE("a dropped layer-1 query") {
    DfsRun run = *base.run;
    REQUIRE_FALSE(run.layer1_queries.empty());
    run.layer1_queries.pop_back();
    CHECK_FALSE(verify_run_invariants(run, g, cfg).ok());
  }
}

TEST_CASE("empirical_block_stats tallies verdicts across runs") {
  const Graph g = gen_complete(20);
  const ExperimentConfig cfg = ExperimentConfig::make(2, 2.0, 0.5, 1.0, {}, 8, 2);
  std::vector<DfsRun> runs;
  for (std::uint32_t t = 0; t < 2; ++t) {
    TrialOutput out = run_trial(g, cfg, t, true);
    REQUIRE(out.run.has_value());
    runs.push_back(std::move(*out.run));
  }

  const BlockStats st = empirical_block_stats(runs, cfg);
  // 20 pops at k = 2 per run: 10 complete blocks each, no tail.
  CHECK(st.total == 20);
  CHECK(st.good == 20);
  CHECK(st.bad == 0);
  CHECK(st.incomplete == 0);
  CHECK(st.good_fraction == doctest::Approx(1.0));
  // Only block 1 draws at p1 = 1 (19 fresh reveals); the rest are vacuous.
  CHECK(st.vacuous_good == 18);
  CHECK(st.mean_queries == doctest::Approx(19.0 / 10.0).epsilon(1e-12));
  CHECK(st.mean_positives == doctest::Approx(19.0 / 10.0).epsilon(1e-12));
}
