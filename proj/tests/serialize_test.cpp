#include <doctest.h>

#include <regex>

#include "percolade/analysis.hpp"
#include "percolade/errors.hpp"
#include "percolade/generators.hpp"
#include "percolade/serialize.hpp"

#include "helpers.hpp"

using namespace percolade;

namespace {

// A mid-probability run with rollbacks is the richest serialization subject.
LoadedRun make_sample() {
  const Graph g = gen_random_regular(48, 5, 17);
  const ExperimentConfig cfg = ExperimentConfig::make(2, 3.0, 0.6, 0.55, {}, 23, 1);
  TrialOutput t = run_trial(g, cfg, 0, true);
  LoadedRun out;
  out.run = std::move(*t.run);
  out.cfg = cfg;
  return out;
}

}  // namespace

TEST_CASE("run JSON round-trips to identical bytes") {
  const LoadedRun sample = make_sample();
  const json j = run_to_json(sample.run, sample.cfg);
  const LoadedRun back = run_from_json(j);
  const json j2 = run_to_json(back.run, back.cfg);
  CHECK(j.dump() == j2.dump());
  CHECK(j["format"] == 1);

  // Spot fields survive.
  CHECK(back.run.n == sample.run.n);
  CHECK(back.run.steps == sample.run.steps);
  CHECK(back.run.labels == sample.run.labels);
  CHECK(back.run.forest.edges() == sample.run.forest.edges());
  CHECK(back.run.layer1_queries == sample.run.layer1_queries);
  CHECK(back.cfg.split.p == sample.cfg.split.p);
  CHECK(back.run.cycle == sample.run.cycle);
}

TEST_CASE("a round-tripped run still verifies clean") {
  const Graph g = gen_complete(12);
  const ExperimentConfig cfg = ExperimentConfig::make(3, 2.0, 0.5, 1.0, {}, 5, 1);
  TrialOutput t = run_trial(g, cfg, 0, true);
  const LoadedRun back = run_from_json(run_to_json(*t.run, cfg));
  CHECK(verify_run_invariants(back.run, g, back.cfg).ok());
}

TEST_CASE("run JSON carries no timestamp") {
  const LoadedRun sample = make_sample();
  const json j = run_to_json(sample.run, sample.cfg);
  CHECK_FALSE(j.contains("generated_at"));
  CHECK(j.dump() == run_to_json(sample.run, sample.cfg).dump());
}

TEST_CASE("wrong schema versions and shapes are rejected with clear messages") {
  const LoadedRun sample = make_sample();
  json j = run_to_json(sample.run, sample.cfg);

  json bumped = j;
  bumped["format"] = 2;
  CHECK_THROWS_WITH_AS(run_from_json(bumped), "unsupported run format 2, expected 1",
                       schema_error);

  json missing = j;
  missing.erase("steps");
  CHECK_THROWS_WITH_AS(run_from_json(missing), "missing field 'steps'", schema_error);

  json wrong_type = j;
  wrong_type["failed"] = "yes";
  CHECK_THROWS_AS(run_from_json(wrong_type), schema_error);

  json bad_label = j;
  bad_label["labels"][0] = 9;
  CHECK_THROWS_AS(run_from_json(bad_label), schema_error);

  json short_parents = j;
  short_parents["parents"].erase(0);
  CHECK_THROWS_AS(run_from_json(short_parents), schema_error);

  CHECK_THROWS_AS(run_from_json(json::array()), schema_error);
}

TEST_CASE("semantically tampered runs load but fail verification") {
  const Graph g = gen_complete(12);
  const ExperimentConfig cfg = ExperimentConfig::make(3, 2.0, 0.5, 1.0, {}, 5, 1);
  TrialOutput t = run_trial(g, cfg, 0, true);
  json j = run_to_json(*t.run, cfg);

  // Rewire vertex 5 under vertex 9: structurally valid JSON, wrong machine.
  j["parents"][5] = 9;
  const LoadedRun loaded = run_from_json(j);
  CHECK_FALSE(verify_run_invariants(loaded.run, g, loaded.cfg).ok());
}

TEST_CASE("config JSON round-trips and validates") {
  const ExperimentConfig cfg = ExperimentConfig::make(7, 5.0, 0.4, 0.3, 0.1, 11, 9, 500);
  const json j = config_to_json(cfg);
  const ExperimentConfig back = config_from_json(j);
  CHECK(back.k == 7);
  CHECK(back.d == 5.0);
  CHECK(back.epsilon == 0.4);
  CHECK(back.split.p == cfg.split.p);
  CHECK(back.split.p1 == cfg.split.p1);
  CHECK(back.split.p2 == cfg.split.p2);
  CHECK(back.seed == 11);
  CHECK(back.trials == 9);
  CHECK(back.step_budget == 500);

  json zero_k = j;
  zero_k["k"] = 0;
  CHECK_THROWS_AS(config_from_json(zero_k), schema_error);
  json bad_p = j;
  bad_p["p"] = 1.5;
  CHECK_THROWS_AS(config_from_json(bad_p), schema_error);
}

TEST_CASE("results CSV uses the frozen golden format") {
  std::vector<TrialResult> trials(2);
  trials[0].trial = 0;
  trials[0].seed = 12345;
  trials[0].cycle_found = true;
  trials[0].cycle_len = 42;
  trials[0].long_edges = 7;
  trials[0].bad_blocks = 1;
  trials[0].failed = false;
  trials[0].millis = 1.2345;
  trials[1].trial = 1;
  trials[1].seed = 67890;
  trials[1].cycle_found = false;
  trials[1].cycle_len = 0;
  trials[1].long_edges = 0;
  trials[1].bad_blocks = 3;
  trials[1].failed = true;
  trials[1].millis = 0.5;

  const std::string expect =
      "trial,seed,cycle_found,cycle_len,long_edges,bad_blocks,failed,millis\n"
      "0,12345,1,42,7,1,0,1.234\n"
      "1,67890,0,0,0,3,1,0.500\n";
  CHECK(results_csv(trials) == expect);

  const auto back = parse_results_csv(expect);
  REQUIRE(back.size() == 2);
  CHECK(back[0].seed == 12345);
  CHECK(back[0].cycle_found);
  CHECK(back[0].millis == doctest::Approx(1.234));
  CHECK(back[1].failed);
  CHECK(back[1].bad_blocks == 3);
}

TEST_CASE("results CSV parse errors carry line numbers") {
  const auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_results_csv(text);
    } catch (const parse_error& e) {
      return e.line;
    }
    return 0;
  };
  CHECK(line_of("") == 1);
  CHECK(line_of("wrong,header\n") == 1);
  const std::string header =
      "trial,seed,cycle_found,cycle_len,long_edges,bad_blocks,failed,millis\n";
  CHECK(line_of(header + "1,2,3\n") == 2);
  CHECK(line_of(header + "0,1,1,5,2,0,0,1.0\nx,1,1,5,2,0,0,1.0\n") == 3);

  // CRLF input parses.
  const std::string crlf =
      "trial,seed,cycle_found,cycle_len,long_edges,bad_blocks,failed,millis\r\n"
      "0,1,1,5,2,0,0,1.000\r\n";
  CHECK(parse_results_csv(crlf).size() == 1);
}

TEST_CASE("sweep CSV round-trips through its golden format") {
  std::vector<SweepRow> rows(2);
  rows[0].p = 0.05;
  rows[0].epsilon = 0.5;
  rows[0].k = 50;
  rows[0].stats.trials = 50;
  rows[0].stats.found = 20;
  rows[0].stats.find_rate = 0.4;
  rows[0].stats.wilson_low = 0.275;
  rows[0].stats.wilson_high = 0.538;
  rows[0].stats.mean_cycle_length = 123.45;
  rows[0].stats.se_cycle_length = 6.7;
  rows[0].stats.mean_long_edges = 89.5;
  rows[1].p = 0.1;
  rows[1].epsilon = 0.5;
  rows[1].k = 50;
  rows[1].stats.trials = 50;
  rows[1].stats.found = 50;
  rows[1].stats.find_rate = 1.0;
  rows[1].stats.wilson_high = 1.0;

  const std::string text = sweep_csv(rows);
  const std::string header_line = text.substr(0, text.find('\n'));
  CHECK(header_line ==
        "p,epsilon,k,trials,found,failed,truncated,find_rate,wilson_low,wilson_high,"
        "mean_cycle_len,se_cycle_len,mean_long_edges");

  const auto back = parse_sweep_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].p == doctest::Approx(0.05));
  CHECK(back[0].k == 50);
  CHECK(back[0].stats.found == 20);
  CHECK(back[0].stats.mean_cycle_length == doctest::Approx(123.45));
  CHECK(back[1].stats.find_rate == doctest::Approx(1.0));

  CHECK_THROWS_AS(parse_sweep_csv("nope\n"), parse_error);
}

TEST_CASE("report JSON exposes config, bounds and stats, timestamp on request") {
  const ExperimentConfig cfg = ExperimentConfig::make(10, 8.0, 0.5, {}, {}, 1, 5);
  const BoundReport bounds = theorem_bounds(cfg);
  ExperimentStats stats;
  stats.trials = 5;
  stats.found = 4;
  stats.find_rate = 0.8;

  const json bare = report_json(cfg, bounds, stats, false);
  CHECK(bare["kind"] == "report");
  CHECK(bare["format"] == 1);
  CHECK(bare["config"]["k"] == 10);
  CHECK(bare["stats"]["found"] == 4);
  CHECK(bare["bounds"]["theorem_applies"] == false);
  CHECK(bare["bounds"]["success_probability"].contains("vacuous"));
  CHECK_FALSE(bare.contains("generated_at"));

  const json stamped = report_json(cfg, bounds, stats, true);
  REQUIRE(stamped.contains("generated_at"));
  const std::string ts = stamped["generated_at"].get<std::string>();
  CHECK(std::regex_match(ts, std::regex(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)")));
}

TEST_CASE("text file helpers round-trip bytes and fail loudly") {
  testutil::TempDir dir;
  const std::string path = dir.file("blob.txt");
  const std::string payload = "line one\nline two\n\x01\x02 binary tail";
  write_text_file(path, payload);
  CHECK(read_text_file(path) == payload);
  CHECK_THROWS_AS(read_text_file(dir.file("absent.txt")), input_error);
  CHECK_THROWS_AS(write_text_file(dir.file("no/such/dir/f.txt"), "x"), input_error);
}
