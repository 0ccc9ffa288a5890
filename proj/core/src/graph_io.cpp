#include "percolade/graph_io.hpp"

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>

#include "percolade/errors.hpp"

namespace percolade {
namespace {

// Parses "a b" with single-space separation and nothing else on the line.
bool parse_pair(const std::string& line, std::uint64_t& a, std::uint64_t& b) {
  std::size_t pos = 0;
  auto parse_uint = [&](std::uint64_t& out) {
    if (pos >= line.size() || line[pos] < '0' || line[pos] > '9') return false;
    out = 0;
    while (pos < line.size() && line[pos] >= '0' && line[pos] <= '9') {
      if (out > (UINT64_MAX - 9) / 10) return false;
      out = out * 10 + static_cast<std::uint64_t>(line[pos] - '0');
      ++pos;
    }
    return true;
  };
  if (!parse_uint(a)) return false;
  if (pos >= line.size() || line[pos] != ' ') return false;
  ++pos;
  if (!parse_uint(b)) return false;
  return pos == line.size();
}

}  // namespace

Graph load_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw parse_error(line_no, "missing header");
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  if (!parse_pair(line, n, m)) throw parse_error(line_no, "malformed header, expected \"n m\"");
  if (n > std::uint64_t{1} << 31) throw parse_error(line_no, "vertex count too large");

  std::vector<Edge> edges;
  edges.reserve(m);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m * 2);
  for (std::uint64_t i = 0; i < m; ++i) {
    ++line_no;
    if (!std::getline(in, line))
      throw parse_error(line_no, "expected " + std::to_string(m) + " edge lines, got " +
                                     std::to_string(i));
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    if (!parse_pair(line, u, v)) throw parse_error(line_no, "malformed edge line");
    if (u == v) throw parse_error(line_no, "self-loop at vertex " + std::to_string(u));
    if (u > v) throw parse_error(line_no, "endpoints must satisfy u < v");
    if (v >= n) throw parse_error(line_no, "vertex id " + std::to_string(v) + " out of range");
    if (!seen.insert(u << 32 | v).second)
      throw parse_error(line_no, "duplicate edge (" + std::to_string(u) + "," +
                                     std::to_string(v) + ")");
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  }
  if (std::getline(in, line) && !line.empty())
    throw parse_error(line_no + 1, "trailing data after " + std::to_string(m) + " edges");
  return Graph::from_edge_list(static_cast<Vertex>(n), edges);
}

void save_graph(const Graph& g, std::ostream& out) {
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (Vertex u = 0; u < g.vertex_count(); ++u)
    for (Vertex v : g.neighbors(u))
      if (u < v) out << u << ' ' << v << '\n';
}

Graph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open graph file: " + path);
  return load_graph(in);
}

void save_graph_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot open for writing: " + path);
  save_graph(g, out);
  if (!out) throw input_error("write failed: " + path);
}

}  // namespace percolade
