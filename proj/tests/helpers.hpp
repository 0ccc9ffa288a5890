#pragma once

// Brute-force oracles and fixture builders shared across the test binaries.
// Everything here is independent of the code under test: cycles are found by
// backtracking, forest distances by BFS, so engine answers can be checked
// against them.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "percolade/forest.hpp"
#include "percolade/graph.hpp"
#include "percolade/rng.hpp"

namespace testutil {

using percolade::Edge;
using percolade::Forest;
using percolade::Graph;
using percolade::Vertex;

inline Graph path_graph(Vertex n) {
  std::vector<Edge> edges;
  for (Vertex v = 0; v + 1 < n; ++v) edges.push_back({v, static_cast<Vertex>(v + 1)});
  return Graph::from_edge_list(n, edges);
}

inline Graph cycle_graph(Vertex n) {
  std::vector<Edge> edges;
  for (Vertex v = 0; v + 1 < n; ++v) edges.push_back({v, static_cast<Vertex>(v + 1)});
  edges.push_back({0, static_cast<Vertex>(n - 1)});
  return Graph::from_edge_list(n, edges);
}

namespace detail {

inline void extend_cycle(const Graph& g, Vertex s, Vertex at, std::vector<char>& on_path,
                         std::size_t len, std::size_t& best) {
  for (Vertex w : g.neighbors(at)) {
    if (w == s && len >= 3) best = std::max(best, len);
    if (w <= s || on_path[w]) continue;
    on_path[w] = 1;
    extend_cycle(g, s, w, on_path, len + 1, best);
    on_path[w] = 0;
  }
}

}  // namespace detail

// Length (in vertices) of the longest simple cycle, 0 when acyclic. Each
// cycle is counted from its minimum vertex, so work stays feasible to n ~ 10.
inline std::size_t longest_cycle_brute(const Graph& g) {
  std::size_t best = 0;
  std::vector<char> on_path(g.vertex_count(), 0);
  for (Vertex s = 0; s < g.vertex_count(); ++s) {
    on_path[s] = 1;
    detail::extend_cycle(g, s, s, on_path, 1, best);
    on_path[s] = 0;
  }
  return best;
}

inline bool is_simple_cycle(const Graph& g, const std::vector<Vertex>& cyc) {
  if (cyc.size() < 3) return false;
  std::vector<char> seen(g.vertex_count(), 0);
  for (Vertex v : cyc) {
    if (v >= g.vertex_count() || seen[v]) return false;
    seen[v] = 1;
  }
  for (std::size_t i = 0; i + 1 < cyc.size(); ++i)
    if (!g.has_edge(cyc[i], cyc[i + 1])) return false;
  return g.has_edge(cyc.back(), cyc.front());
}

// BFS over parent and child links; the slow mirror of ForestIndex::distance.
inline std::optional<std::size_t> forest_distance_bfs(const Forest& f, Vertex x, Vertex y) {
  if (x == y) return 0;
  std::vector<std::size_t> dist(f.size(), SIZE_MAX);
  std::queue<Vertex> q;
  dist[x] = 0;
  q.push(x);
  while (!q.empty()) {
    const Vertex v = q.front();
    q.pop();
    auto visit = [&](Vertex w) {
      if (dist[w] == SIZE_MAX) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
    };
    if (!f.is_root(v)) visit(f.parent(v));
    for (Vertex c : f.children(v)) visit(c);
  }
  if (dist[y] == SIZE_MAX) return std::nullopt;
  return dist[y];
}

inline bool is_connected(const Graph& g) {
  if (g.vertex_count() == 0) return true;
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : g.neighbors(v))
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == g.vertex_count();
}

inline Graph complete_fixture(Vertex n) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
  return Graph::from_edge_list(n, edges);
}

// Deterministic fixture set: structured families first, then seeded
// Erdos-Renyi draws filtered to connected, all on at most max_n vertices.
inline std::vector<Graph> connected_fixture_graphs(std::size_t count, Vertex max_n,
                                                   std::uint64_t seed) {
  std::vector<Graph> out;
  auto add = [&](Graph g) {
    if (out.size() < count) out.push_back(std::move(g));
  };
  for (Vertex n = 3; n <= max_n; ++n) {
    add(complete_fixture(n));
    add(cycle_graph(n));
    add(path_graph(n));
  }
  percolade::RandomStream rng(seed, percolade::StreamClass::Generator, 999);
  while (out.size() < count) {
    const Vertex n = static_cast<Vertex>(3 + rng.next_below(max_n - 2));
    const double p = 0.3 + 0.6 * rng.next_unit();
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v)
        if (rng.next_unit() < p) edges.push_back({u, v});
    Graph g = Graph::from_edge_list(n, edges);
    if (is_connected(g)) add(std::move(g));
  }
  return out;
}

// Unique scratch directory, removed on scope exit.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    const auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    for (int attempt = 0; attempt < 64; ++attempt) {
      auto candidate = base / ("percolade_test_" + std::to_string(rd()));
      if (std::filesystem::create_directory(candidate)) {
        path = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create scratch directory");
  }

  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }

  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace testutil
