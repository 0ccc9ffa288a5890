#include "percolade/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "percolade/errors.hpp"

namespace percolade {

namespace {

constexpr int kRunFormat = 1;

std::int64_t encode_vertex(Vertex v) {
  return v == Forest::npos ? -1 : static_cast<std::int64_t>(v);
}

Vertex decode_vertex(std::int64_t raw, Vertex n, const char* what) {
  if (raw == -1) return Forest::npos;
  if (raw < 0 || static_cast<std::uint64_t>(raw) >= n)
    throw schema_error(std::string(what) + " out of range");
  return static_cast<Vertex>(raw);
}

const json& require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw schema_error(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T field(const json& j, const char* key) {
  try {
    return require(j, key).get<T>();
  } catch (const json::exception&) {
    throw schema_error(std::string("field '") + key + "' has the wrong type");
  }
}

const char* verdict_name(BlockVerdict v) {
  switch (v) {
    case BlockVerdict::Good: return "good";
    case BlockVerdict::Bad: return "bad";
    case BlockVerdict::Incomplete: return "incomplete";
  }
  return "incomplete";
}

BlockVerdict verdict_from(const std::string& s) {
  if (s == "good") return BlockVerdict::Good;
  if (s == "bad") return BlockVerdict::Bad;
  if (s == "incomplete") return BlockVerdict::Incomplete;
  throw schema_error("unknown block verdict '" + s + "'");
}

json queries_to_json(const std::vector<std::pair<Edge, bool>>& qs) {
  json out = json::array();
  for (const auto& [e, open] : qs) out.push_back({e.u, e.v, open ? 1 : 0});
  return out;
}

std::vector<std::pair<Edge, bool>> queries_from_json(const json& j, Vertex n) {
  if (!j.is_array()) throw schema_error("query snapshot is not an array");
  std::vector<std::pair<Edge, bool>> out;
  out.reserve(j.size());
  for (const json& row : j) {
    if (!row.is_array() || row.size() != 3) throw schema_error("query entry is not a triple");
    const Vertex u = decode_vertex(row[0].get<std::int64_t>(), n, "query endpoint");
    const Vertex v = decode_vertex(row[1].get<std::int64_t>(), n, "query endpoint");
    out.emplace_back(Edge{u, v}, row[2].get<int>() != 0);
  }
  return out;
}

}  // namespace

json config_to_json(const ExperimentConfig& cfg) {
  return json{{"k", cfg.k},
              {"d", cfg.d},
              {"epsilon", cfg.epsilon},
              {"p", cfg.split.p},
              {"p1", cfg.split.p1},
              {"p2", cfg.split.p2},
              {"seed", cfg.seed},
              {"trials", cfg.trials},
              {"step_budget", cfg.step_budget}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.k = field<std::uint32_t>(j, "k");
  cfg.d = field<double>(j, "d");
  cfg.epsilon = field<double>(j, "epsilon");
  cfg.split.p = field<double>(j, "p");
  cfg.split.p1 = field<double>(j, "p1");
  cfg.split.p2 = field<double>(j, "p2");
  cfg.seed = field<std::uint64_t>(j, "seed");
  cfg.trials = field<std::uint32_t>(j, "trials");
  cfg.step_budget = field<std::uint64_t>(j, "step_budget");
  if (cfg.k == 0) throw schema_error("k must be at least 1");
  if (!(cfg.d > 1.0)) throw schema_error("d must exceed 1");
  if (!(cfg.epsilon > 0.0)) throw schema_error("epsilon must be positive");
  for (const double x : {cfg.split.p, cfg.split.p1, cfg.split.p2})
    if (!(x >= 0.0 && x <= 1.0)) throw schema_error("probability out of range");
  return cfg;
}

json run_to_json(const DfsRun& run, const ExperimentConfig& cfg) {
  json blocks = json::array();
  for (const BlockRecord& b : run.blocks) {
    json outcomes = json::array();
    for (const std::uint8_t o : b.outcomes) outcomes.push_back(static_cast<int>(o));
    blocks.push_back({{"index", b.index},
                      {"first_processed", encode_vertex(b.first_processed)},
                      {"last_processed", encode_vertex(b.last_processed)},
                      {"boundary_step", b.boundary_step},
                      {"active_size", b.active_size},
                      {"safe_size_after", b.safe_size_after},
                      {"outcomes", std::move(outcomes)},
                      {"positives", b.positives},
                      {"verdict", verdict_name(b.verdict)}});
  }

  json events = json::array();
  for (const SafeEvent& ev : run.safe_events)
    events.push_back({{"kind", ev.kind == SafeEvent::Kind::Create ? "create" : "consume"},
                      {"block", ev.block},
                      {"anchor", encode_vertex(ev.anchor)},
                      {"vertex", encode_vertex(ev.vertex)}});

  json rollbacks = json::array();
  for (const RollbackEvent& rb : run.rollbacks)
    rollbacks.push_back(
        {{"block", rb.block}, {"target", encode_vertex(rb.target)}, {"trashed", rb.trashed}});

  json labels = json::array();
  for (const VertexState st : run.labels) labels.push_back(static_cast<int>(st));

  json parents = json::array();
  for (Vertex v = 0; v < run.n; ++v) parents.push_back(encode_vertex(run.forest.parent(v)));

  json long_edges = json::array();
  for (const LongEdge& le : run.long_edges) long_edges.push_back({le.u, le.v, le.rho});

  json j{{"format", kRunFormat},
         {"config", config_to_json(cfg)},
         {"n", run.n},
         {"trial_seed", run.trial_seed},
         {"labels", std::move(labels)},
         {"active", run.active},
         {"safe", run.safe},
         {"parents", std::move(parents)},
         {"blocks", std::move(blocks)},
         {"safe_events", std::move(events)},
         {"rollbacks", std::move(rollbacks)},
         {"failed", run.failed},
         {"fail_block", run.fail_block},
         {"truncated", run.truncated},
         {"steps", run.steps},
         {"processed", run.processed},
         {"layer1", queries_to_json(run.layer1_queries)},
         {"layer2", queries_to_json(run.layer2_queries)},
         {"long_edges", std::move(long_edges)},
         {"long_edges_computed", run.long_edges_computed}};
  if (run.cycle)
    j["cycle"] = *run.cycle;
  else
    j["cycle"] = nullptr;
  return j;
}

LoadedRun run_from_json(const json& j) {
  if (!j.is_object()) throw schema_error("run document is not an object");
  const json& fmt_field = require(j, "format");
  if (!fmt_field.is_number_integer() || fmt_field.get<int>() != kRunFormat)
    throw schema_error("unsupported run format " + fmt_field.dump() + ", expected " +
                       std::to_string(kRunFormat));

  LoadedRun out;
  out.cfg = config_from_json(require(j, "config"));
  DfsRun& run = out.run;
  run.n = field<Vertex>(j, "n");
  run.trial_seed = field<std::uint64_t>(j, "trial_seed");

  const json& labels = require(j, "labels");
  if (!labels.is_array() || labels.size() != run.n)
    throw schema_error("labels must list one state per vertex");
  run.labels.reserve(run.n);
  for (const json& l : labels) {
    const int v = l.get<int>();
    if (v < 0 || v > 3) throw schema_error("unknown vertex state " + std::to_string(v));
    run.labels.push_back(static_cast<VertexState>(v));
  }

  for (const json& v : require(j, "active"))
    run.active.push_back(decode_vertex(v.get<std::int64_t>(), run.n, "active vertex"));
  for (const json& v : require(j, "safe"))
    run.safe.push_back(decode_vertex(v.get<std::int64_t>(), run.n, "checkpoint vertex"));

  const json& parents = require(j, "parents");
  if (!parents.is_array() || parents.size() != run.n)
    throw schema_error("parents must list one entry per vertex");
  run.forest = Forest(run.n);
  for (Vertex v = 0; v < run.n; ++v) {
    const Vertex p = decode_vertex(parents[v].get<std::int64_t>(), run.n, "parent");
    if (p != Forest::npos) run.forest.set_parent(v, p);
  }

  for (const json& b : require(j, "blocks")) {
    BlockRecord rec;
    rec.index = field<std::uint32_t>(b, "index");
    rec.first_processed =
        decode_vertex(field<std::int64_t>(b, "first_processed"), run.n, "block vertex");
    rec.last_processed =
        decode_vertex(field<std::int64_t>(b, "last_processed"), run.n, "block vertex");
    rec.boundary_step = field<std::uint64_t>(b, "boundary_step");
    rec.active_size = field<std::uint32_t>(b, "active_size");
    rec.safe_size_after = field<std::uint32_t>(b, "safe_size_after");
    for (const json& o : require(b, "outcomes"))
      rec.outcomes.push_back(o.get<int>() != 0 ? 1 : 0);
    rec.positives = field<std::uint32_t>(b, "positives");
    rec.verdict = verdict_from(field<std::string>(b, "verdict"));
    run.blocks.push_back(std::move(rec));
  }

  for (const json& e : require(j, "safe_events")) {
    SafeEvent ev;
    const std::string kind = field<std::string>(e, "kind");
    if (kind == "create")
      ev.kind = SafeEvent::Kind::Create;
    else if (kind == "consume")
      ev.kind = SafeEvent::Kind::Consume;
    else
      throw schema_error("unknown checkpoint event kind '" + kind + "'");
    ev.block = field<std::uint32_t>(e, "block");
    ev.anchor = decode_vertex(field<std::int64_t>(e, "anchor"), run.n, "event anchor");
    ev.vertex = decode_vertex(field<std::int64_t>(e, "vertex"), run.n, "event vertex");
    run.safe_events.push_back(ev);
  }

  for (const json& r : require(j, "rollbacks")) {
    RollbackEvent rb;
    rb.block = field<std::uint32_t>(r, "block");
    rb.target = decode_vertex(field<std::int64_t>(r, "target"), run.n, "rollback target");
    for (const json& v : require(r, "trashed"))
      rb.trashed.push_back(decode_vertex(v.get<std::int64_t>(), run.n, "trashed vertex"));
    run.rollbacks.push_back(std::move(rb));
  }

  run.failed = field<bool>(j, "failed");
  run.fail_block = field<std::uint32_t>(j, "fail_block");
  run.truncated = field<bool>(j, "truncated");
  run.steps = field<std::uint64_t>(j, "steps");
  run.processed = field<std::uint64_t>(j, "processed");
  run.layer1_queries = queries_from_json(require(j, "layer1"), run.n);
  run.layer2_queries = queries_from_json(require(j, "layer2"), run.n);

  for (const json& row : require(j, "long_edges")) {
    if (!row.is_array() || row.size() != 3) throw schema_error("long-edge entry is not a triple");
    LongEdge le;
    le.u = decode_vertex(row[0].get<std::int64_t>(), run.n, "long-edge endpoint");
    le.v = decode_vertex(row[1].get<std::int64_t>(), run.n, "long-edge endpoint");
    le.rho = row[2].get<std::size_t>();
    run.long_edges.push_back(le);
  }
  run.long_edges_computed = field<bool>(j, "long_edges_computed");

  const json& cyc = require(j, "cycle");
  if (!cyc.is_null()) {
    std::vector<Vertex> cycle;
    for (const json& v : cyc)
      cycle.push_back(decode_vertex(v.get<std::int64_t>(), run.n, "cycle vertex"));
    run.cycle = std::move(cycle);
  }
  return out;
}

std::string results_csv(std::span<const TrialResult> trials) {
  std::string out = "trial,seed,cycle_found,cycle_len,long_edges,bad_blocks,failed,millis\n";
  char buf[192];
  for (const TrialResult& t : trials) {
    std::snprintf(buf, sizeof buf, "%" PRIu32 ",%" PRIu64 ",%d,%" PRIu64 ",%" PRIu64 ",%" PRIu32 ",%d,%.3f\n",
                  t.trial, t.seed, t.cycle_found ? 1 : 0, t.cycle_len, t.long_edges,
                  t.bad_blocks, t.failed ? 1 : 0, t.millis);
    out += buf;
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (const char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

std::vector<TrialResult> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw parse_error(1, "empty results file");
  if (line == "trial,seed,cycle_found,cycle_len,long_edges,bad_blocks,failed,millis\r")
    line.pop_back();
  if (line != "trial,seed,cycle_found,cycle_len,long_edges,bad_blocks,failed,millis")
    throw parse_error(1, "unexpected results header");
  std::vector<TrialResult> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 8) throw parse_error(lineno, "expected 8 columns");
    try {
      TrialResult t;
      t.trial = static_cast<std::uint32_t>(std::stoul(cells[0]));
      t.seed = std::stoull(cells[1]);
      t.cycle_found = std::stoi(cells[2]) != 0;
      t.cycle_len = std::stoull(cells[3]);
      t.long_edges = std::stoull(cells[4]);
      t.bad_blocks = static_cast<std::uint32_t>(std::stoul(cells[5]));
      t.failed = std::stoi(cells[6]) != 0;
      t.millis = std::stod(cells[7]);
      out.push_back(t);
    } catch (const std::exception&) {
      throw parse_error(lineno, "malformed results row");
    }
  }
  return out;
}

namespace {

constexpr char kSweepHeader[] =
    "p,epsilon,k,trials,found,failed,truncated,find_rate,wilson_low,wilson_high,"
    "mean_cycle_len,se_cycle_len,mean_long_edges";

}  // namespace

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = std::string(kSweepHeader) + "\n";
  char buf[320];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%.9g,%.9g,%" PRIu32 ",%" PRIu32 ",%" PRIu32 ",%" PRIu32 ",%" PRIu32
                  ",%.6f,%.6f,%.6f,%.4f,%.4f,%.4f\n",
                  r.p, r.epsilon, r.k, r.stats.trials, r.stats.found, r.stats.failed,
                  r.stats.truncated, r.stats.find_rate, r.stats.wilson_low, r.stats.wilson_high,
                  r.stats.mean_cycle_length, r.stats.se_cycle_length, r.stats.mean_long_edges);
    out += buf;
  }
  return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw parse_error(1, "empty sweep file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepHeader) throw parse_error(1, "unexpected sweep header");
  std::vector<SweepRow> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 13) throw parse_error(lineno, "expected 13 columns");
    try {
      SweepRow r;
      r.p = std::stod(cells[0]);
      r.epsilon = std::stod(cells[1]);
      r.k = static_cast<std::uint32_t>(std::stoul(cells[2]));
      r.stats.trials = static_cast<std::uint32_t>(std::stoul(cells[3]));
      r.stats.found = static_cast<std::uint32_t>(std::stoul(cells[4]));
      r.stats.failed = static_cast<std::uint32_t>(std::stoul(cells[5]));
      r.stats.truncated = static_cast<std::uint32_t>(std::stoul(cells[6]));
      r.stats.find_rate = std::stod(cells[7]);
      r.stats.wilson_low = std::stod(cells[8]);
      r.stats.wilson_high = std::stod(cells[9]);
      r.stats.mean_cycle_length = std::stod(cells[10]);
      r.stats.se_cycle_length = std::stod(cells[11]);
      r.stats.mean_long_edges = std::stod(cells[12]);
      out.push_back(r);
    } catch (const std::exception&) {
      throw parse_error(lineno, "malformed sweep row");
    }
  }
  return out;
}

json report_json(const ExperimentConfig& cfg, const BoundReport& bounds,
                 const ExperimentStats& stats, bool with_timestamp) {
  const auto bound_json = [](const BoundValue& b) {
    return json{{"raw", b.raw}, {"value", b.value}, {"vacuous", b.vacuous}};
  };
  json j{{"format", 1},
         {"kind", "report"},
         {"config", config_to_json(cfg)},
         {"bounds",
          {{"target_cycle_length", bounds.target_cycle_length},
           {"long_edge_threshold", bounds.long_edge_threshold},
           {"success_probability", bound_json(bounds.success_probability)},
           {"block_good_probability", bound_json(bounds.block_good_probability)},
           {"z_decay_rate", bounds.z_decay_rate},
           {"z_decay_probability", bound_json(bounds.z_decay_probability)},
           {"sprinkling_probability", bound_json(bounds.sprinkling_probability)},
           {"theorem_applies", bounds.theorem_applies}}},
         {"stats",
          {{"trials", stats.trials},
           {"found", stats.found},
           {"failed", stats.failed},
           {"truncated", stats.truncated},
           {"find_rate", stats.find_rate},
           {"wilson_low", stats.wilson_low},
           {"wilson_high", stats.wilson_high},
           {"mean_cycle_length", stats.mean_cycle_length},
           {"stddev_cycle_length", stats.stddev_cycle_length},
           {"se_cycle_length", stats.se_cycle_length},
           {"mean_long_edges", stats.mean_long_edges},
           {"total_millis", stats.total_millis}}}};
  if (with_timestamp) {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    j["generated_at"] = buf;
  }
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw input_error("failed reading '" + path + "'");
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw input_error("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw input_error("failed writing '" + path + "'");
}

}  // namespace percolade
