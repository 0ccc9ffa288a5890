#include "percolade/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "percolade/analysis.hpp"
#include "percolade/config.hpp"
#include "percolade/errors.hpp"
#include "percolade/generators.hpp"
#include "percolade/graph_io.hpp"
#include "percolade/serialize.hpp"
#include "percolade/svg.hpp"

namespace percolade {

namespace {

// Argument-level failures that CLI11 cannot see (grid contents, zero trials).
struct usage_failure {
  std::string message;
};

struct ConfigFlags {
  std::string config_file;
  std::optional<std::uint32_t> k;
  std::optional<double> d;
  std::optional<double> epsilon;
  std::optional<double> p;
  std::optional<double> p2;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> trials;
  std::optional<std::uint64_t> step_budget;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.config_file, "config JSON file");
  cmd->add_option("--k", f.k, "block size (vertices per block)");
  cmd->add_option("--d", f.d, "expansion rate, must exceed 1");
  cmd->add_option("--epsilon", f.epsilon, "supercriticality (> 0)");
  cmd->add_option("--p", f.p, "total edge probability override");
  cmd->add_option("--p2", f.p2, "sprinkling-layer probability override");
  cmd->add_option("--seed", f.seed, "master seed (default 0)");
  cmd->add_option("--trials", f.trials, "number of trials");
  cmd->add_option("--step-budget", f.step_budget, "step cap per run (0 = derived)");
}

// Raw resolved fields; split validation happens per constructed config, so a
// sweep can override p before anything is derived.
struct ResolvedConfig {
  std::uint32_t k = 10;
  double d = 2.0;
  double epsilon = 0.5;
  std::optional<double> p;
  std::optional<double> p2;
  std::uint64_t seed = 0;
  std::uint32_t trials = 1;
  std::uint64_t step_budget = 0;

  ExperimentConfig make() const {
    return ExperimentConfig::make(k, d, epsilon, p, p2, seed, trials, step_budget);
  }
};

// Precedence: flag, then config-file key, then default.
ResolvedConfig resolve_config_full(const ConfigFlags& f) {
  json file = json::object();
  if (!f.config_file.empty()) {
    try {
      file = json::parse(read_text_file(f.config_file));
    } catch (const json::exception& e) {
      throw input_error("config file '" + f.config_file + "': " + e.what());
    }
    if (!file.is_object()) throw input_error("config file must hold a JSON object");
  }

  const auto pick = [&file]<typename T>(const std::optional<T>& flag, const char* key,
                                        T fallback) -> T {
    if (flag) return *flag;
    const auto it = file.find(key);
    if (it == file.end()) return fallback;
    try {
      return it->get<T>();
    } catch (const json::exception&) {
      throw input_error(std::string("config key '") + key + "' has the wrong type");
    }
  };
  const auto pick_opt = [&file]<typename T>(const std::optional<T>& flag,
                                            const char* key) -> std::optional<T> {
    if (flag) return flag;
    const auto it = file.find(key);
    if (it == file.end()) return std::nullopt;
    try {
      return it->get<T>();
    } catch (const json::exception&) {
      throw input_error(std::string("config key '") + key + "' has the wrong type");
    }
  };

  ResolvedConfig rc;
  rc.k = pick(f.k, "k", std::uint32_t{10});
  rc.d = pick(f.d, "d", 2.0);
  rc.epsilon = pick(f.epsilon, "epsilon", 0.5);
  rc.p = pick_opt(f.p, "p");
  rc.p2 = pick_opt(f.p2, "p2");
  rc.seed = pick(f.seed, "seed", std::uint64_t{0});
  rc.trials = pick(f.trials, "trials", std::uint32_t{1});
  rc.step_budget = pick(f.step_budget, "step_budget", std::uint64_t{0});
  if (rc.trials == 0) throw usage_failure{"trials must be at least 1"};
  return rc;
}

ExperimentConfig resolve_config(const ConfigFlags& f) { return resolve_config_full(f).make(); }

unsigned resolve_threads(const std::optional<unsigned>& flag) {
  if (flag) return std::max(1u, *flag);
  if (const char* env = std::getenv("PERCOLADE_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0 || v > 4096)
      throw input_error("PERCOLADE_THREADS must be a positive thread count");
    return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

Graph load_graph_checked(const std::string& path) {
  if (path.empty()) throw usage_failure{"--graph is required"};
  return load_graph_file(path);
}

std::vector<double> parse_double_grid(const std::string& text, const char* name) {
  std::vector<double> out;
  std::size_t at = 0;
  while (at <= text.size()) {
    const std::size_t comma = std::min(text.find(',', at), text.size());
    const std::string token = text.substr(at, comma - at);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size())
      throw usage_failure{std::string(name) + " has a malformed entry '" + token + "'"};
    out.push_back(v);
    at = comma + 1;
  }
  if (out.empty()) throw usage_failure{std::string(name) + " is empty"};
  return out;
}

std::vector<std::uint32_t> parse_uint_grid(const std::string& text, const char* name) {
  std::vector<std::uint32_t> out;
  for (const double v : parse_double_grid(text, name)) {
    if (v < 1 || v != static_cast<double>(static_cast<std::uint32_t>(v)))
      throw usage_failure{std::string(name) + " entries must be positive integers"};
    out.push_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

void print_summary(const ExperimentConfig& cfg, const ExperimentStats& st) {
  const BoundReport bounds = theorem_bounds(cfg);
  std::printf("trials %u: cycles %u (rate %.3f, 95%% [%.3f, %.3f])", st.trials, st.found,
              st.find_rate, st.wilson_low, st.wilson_high);
  if (st.found > 0) std::printf(", mean length %.1f", st.mean_cycle_length);
  std::printf(", target length %.2f", bounds.target_cycle_length);
  if (st.failed > 0) std::printf(", failed %u", st.failed);
  if (st.truncated > 0) std::printf(", truncated %u", st.truncated);
  std::printf("\n");
  if (!bounds.theorem_applies)
    std::printf("note: epsilon is below 300/sqrt(d); the success guarantee does not apply at "
                "these parameters\n");
}

struct GenArgs {
  std::string family;
  std::uint32_t n = 0;
  std::uint32_t r = 0;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_gen(const GenArgs& a) {
  Graph g;
  if (a.family == "complete") {
    g = gen_complete(a.n);
  } else if (a.family == "bipartite") {
    g = gen_complete_bipartite(a.n, a.r);
  } else {
    g = gen_random_regular(a.n, a.r, a.seed);
  }
  if (a.out.empty())
    save_graph(g, std::cout);
  else
    save_graph_file(g, a.out);
}

struct CertifyArgs {
  std::string graph;
  std::uint32_t k = 1;
  double d = 2.0;
  std::string mode = "exact";
  std::uint64_t trials = 200;
  std::uint64_t seed = 0;
  std::uint64_t budget = 2'000'000;
};

void cmd_certify(const CertifyArgs& a) {
  const Graph g = load_graph_checked(a.graph);
  const ExpansionVerdict v = a.mode == "exact"
                                 ? certify_exact(g, a.k, a.d, a.budget)
                                 : certify_sampled(g, a.k, a.d, a.trials, a.seed);
  json out{{"k", a.k},
           {"d", a.d},
           {"mode", a.mode},
           {"checked_subsets", v.checked_subsets}};
  switch (v.status) {
    case ExpansionStatus::CertifiedExact: out["status"] = "certified"; break;
    case ExpansionStatus::Refuted: out["status"] = "refuted"; break;
    case ExpansionStatus::PlausibleSampled: out["status"] = "plausible_sampled"; break;
  }
  if (v.witness)
    out["witness"] = *v.witness;
  else
    out["witness"] = nullptr;
  std::printf("%s\n", out.dump(2).c_str());
}

struct RunArgs {
  std::string graph;
  ConfigFlags cfg;
  std::string out_dir = ".";
  std::optional<unsigned> threads;
  bool save_runs = false;
};

void cmd_run(const RunArgs& a) {
  const Graph g = load_graph_checked(a.graph);
  const ExperimentConfig cfg = resolve_config(a.cfg);
  if (g.vertex_count() < cfg.k)
    throw input_error("graph has " + std::to_string(g.vertex_count()) +
                      " vertices, fewer than the block size k = " + std::to_string(cfg.k));
  const unsigned threads = resolve_threads(a.threads);

  const ExperimentResult res = run_experiment(g, cfg, threads, a.save_runs);

  std::filesystem::create_directories(a.out_dir);
  const auto path = [&](const std::string& name) {
    return (std::filesystem::path(a.out_dir) / name).string();
  };
  write_text_file(path("results.csv"), results_csv(res.trials));
  write_text_file(path("report.json"),
                  report_json(cfg, theorem_bounds(cfg), res.stats, true).dump(2) + "\n");
  if (a.save_runs)
    for (std::size_t i = 0; i < res.runs.size(); ++i)
      write_text_file(path("run_" + std::to_string(i) + ".json"),
                      run_to_json(res.runs[i], cfg).dump(2) + "\n");
  print_summary(cfg, res.stats);
}

struct SweepArgs {
  std::string graph;
  ConfigFlags cfg;
  std::string p_grid;
  std::string eps_grid;
  std::string k_grid;
  std::string out_dir = ".";
  std::string svg;
  std::optional<unsigned> threads;
};

void cmd_sweep(const SweepArgs& a) {
  const Graph g = load_graph_checked(a.graph);
  const ResolvedConfig rc = resolve_config_full(a.cfg);
  const unsigned threads = resolve_threads(a.threads);

  // Missing grids collapse to the single configured value; an unset p stays
  // unset so each epsilon keeps its own default derivation.
  std::vector<std::optional<double>> ps;
  if (a.p_grid.empty()) {
    ps.push_back(rc.p);
  } else {
    for (const double v : parse_double_grid(a.p_grid, "--p-grid")) ps.emplace_back(v);
  }
  const std::vector<double> epss = a.eps_grid.empty()
                                       ? std::vector<double>{rc.epsilon}
                                       : parse_double_grid(a.eps_grid, "--eps-grid");
  const std::vector<std::uint32_t> ks =
      a.k_grid.empty() ? std::vector<std::uint32_t>{rc.k} : parse_uint_grid(a.k_grid, "--k-grid");

  std::vector<SweepRow> rows;
  for (const std::optional<double>& p : ps)
    for (const double eps : epss)
      for (const std::uint32_t k : ks) {
        const ExperimentConfig cfg = ExperimentConfig::make(
            k, rc.d, eps, p, rc.p2, rc.seed, rc.trials, rc.step_budget);
        if (g.vertex_count() < cfg.k)
          throw input_error("grid point k = " + std::to_string(k) +
                            " exceeds the graph's vertex count");
        const ExperimentResult res = run_experiment(g, cfg, threads);
        rows.push_back({cfg.split.p, cfg.epsilon, cfg.k, res.stats});
        std::printf("p=%.6g eps=%.6g k=%u: rate %.3f, mean length %.1f\n", cfg.split.p,
                    cfg.epsilon, cfg.k, res.stats.find_rate, res.stats.mean_cycle_length);
      }

  std::filesystem::create_directories(a.out_dir);
  const auto csv_path = (std::filesystem::path(a.out_dir) / "sweep.csv").string();
  write_text_file(csv_path, sweep_csv(rows));
  if (!a.svg.empty()) write_text_file(a.svg, sweep_chart_svg(rows, "long-cycle sweep"));
}

struct VerifyArgs {
  std::string graph;
  std::string in;
};

int cmd_verify(const VerifyArgs& a) {
  const Graph g = load_graph_checked(a.graph);
  json doc;
  try {
    doc = json::parse(read_text_file(a.in));
  } catch (const json::exception& e) {
    throw input_error("run file '" + a.in + "': " + e.what());
  }
  const LoadedRun loaded = run_from_json(doc);
  const InvariantReport rep = verify_run_invariants(loaded.run, g, loaded.cfg);

  std::printf("hard checks: %llu  violations: %zu\n",
              static_cast<unsigned long long>(rep.hard_checks), rep.hard.size());
  for (const std::string& m : rep.hard) std::printf("  hard: %s\n", m.c_str());
  std::printf("soft checks: %llu  findings: %zu\n",
              static_cast<unsigned long long>(rep.soft_checks), rep.soft.size());
  for (const std::string& m : rep.soft) std::printf("  soft: %s\n", m.c_str());
  std::printf("verdict: %s\n", rep.ok() ? "pass" : "fail");
  return rep.ok() ? 0 : 1;
}

struct ReportArgs {
  std::string in;
  ConfigFlags cfg;
  std::string out;
  std::string svg;
};

void cmd_report(const ReportArgs& a) {
  if (a.in.empty()) throw usage_failure{"--in is required"};
  const std::string text = read_text_file(a.in);
  const std::size_t eol = std::min(text.find('\n'), text.size());
  const std::string header = text.substr(0, eol);

  if (header.rfind("p,epsilon,k,", 0) == 0) {
    const std::vector<SweepRow> rows = parse_sweep_csv(text);
    if (a.svg.empty()) throw usage_failure{"a sweep input needs --svg for the chart output"};
    write_text_file(a.svg, sweep_chart_svg(rows, "long-cycle sweep"));
    std::printf("wrote %s (%zu points)\n", a.svg.c_str(), rows.size());
    return;
  }

  if (!a.svg.empty()) throw usage_failure{"--svg needs a sweep CSV input"};
  const std::vector<TrialResult> trials = parse_results_csv(text);
  const ExperimentConfig cfg = resolve_config(a.cfg);
  const json rep = report_json(cfg, theorem_bounds(cfg), summarize_trials(trials), true);
  if (a.out.empty())
    std::printf("%s\n", rep.dump(2).c_str());
  else
    write_text_file(a.out, rep.dump(2) + "\n");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"percolation long-cycle search toolkit"};
  app.require_subcommand(1);

  auto gen = std::make_shared<GenArgs>();
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a graph edge-list file");
  gen_cmd->add_option("--family", gen->family, "graph family")
      ->required()
      ->check(CLI::IsMember({"complete", "bipartite", "regular"}));
  gen_cmd->add_option("--n", gen->n, "vertex count (left side for bipartite)")->required();
  gen_cmd->add_option("--r", gen->r, "degree (right side for bipartite)");
  gen_cmd->add_option("--seed", gen->seed, "generation seed");
  gen_cmd->add_option("--out", gen->out, "output file (default stdout)");
  gen_cmd->callback([gen] { cmd_gen(*gen); });

  auto certify = std::make_shared<CertifyArgs>();
  CLI::App* certify_cmd = app.add_subcommand("certify", "check k-set vertex expansion");
  certify_cmd->add_option("--graph", certify->graph, "edge-list file")->required();
  certify_cmd->add_option("--k", certify->k, "subset size")->required();
  certify_cmd->add_option("--d", certify->d, "required expansion rate")->required();
  certify_cmd->add_option("--mode", certify->mode, "exact or sampled")
      ->check(CLI::IsMember({"exact", "sampled"}));
  certify_cmd->add_option("--trials", certify->trials, "sampled-mode subset draws");
  certify_cmd->add_option("--seed", certify->seed, "sampled-mode seed");
  certify_cmd->add_option("--budget", certify->budget, "exact-mode subset budget");
  certify_cmd->callback([certify] { cmd_certify(*certify); });

  auto run = std::make_shared<RunArgs>();
  CLI::App* run_cmd = app.add_subcommand("run", "run seeded trials and write results");
  run_cmd->add_option("--graph", run->graph, "edge-list file")->required();
  add_config_flags(run_cmd, run->cfg);
  run_cmd->add_option("--out", run->out_dir, "output directory (default .)");
  run_cmd->add_option("--threads", run->threads, "worker threads");
  run_cmd->add_flag("--save-runs", run->save_runs, "write one run JSON per trial");
  run_cmd->callback([run] { cmd_run(*run); });

  auto sweep = std::make_shared<SweepArgs>();
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter grid");
  sweep_cmd->add_option("--graph", sweep->graph, "edge-list file")->required();
  add_config_flags(sweep_cmd, sweep->cfg);
  sweep_cmd->add_option("--p-grid", sweep->p_grid, "comma-separated p values");
  sweep_cmd->add_option("--eps-grid", sweep->eps_grid, "comma-separated epsilon values");
  sweep_cmd->add_option("--k-grid", sweep->k_grid, "comma-separated k values");
  sweep_cmd->add_option("--out", sweep->out_dir, "output directory (default .)");
  sweep_cmd->add_option("--svg", sweep->svg, "also write a chart to this file");
  sweep_cmd->add_option("--threads", sweep->threads, "worker threads");
  sweep_cmd->callback([sweep] { cmd_sweep(*sweep); });

  auto verify = std::make_shared<VerifyArgs>();
  auto verify_exit = std::make_shared<int>(0);
  CLI::App* verify_cmd = app.add_subcommand("verify", "re-audit a stored run");
  verify_cmd->add_option("--graph", verify->graph, "edge-list file")->required();
  verify_cmd->add_option("--in", verify->in, "run JSON file")->required();
  verify_cmd->callback([verify, verify_exit] { *verify_exit = cmd_verify(*verify); });

  auto report = std::make_shared<ReportArgs>();
  CLI::App* report_cmd = app.add_subcommand("report", "summarize stored CSV results");
  report_cmd->add_option("--in", report->in, "results.csv or sweep.csv")->required();
  add_config_flags(report_cmd, report->cfg);
  report_cmd->add_option("--out", report->out, "report JSON output (default stdout)");
  report_cmd->add_option("--svg", report->svg, "chart output for sweep input");
  report_cmd->callback([report] { cmd_report(*report); });

  try {
    app.parse(argc, argv);
    return *verify_exit;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const usage_failure& e) {
    std::fprintf(stderr, "usage error: %s\n", e.message.c_str());
    return 2;
  } catch (const error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace percolade
