#include "percolade/graph.hpp"

#include <algorithm>

namespace percolade {

Graph Graph::from_edge_list(Vertex n, const std::vector<Edge>& edges) {
  Graph g;
  g.n_ = n;
  g.m_ = edges.size();

  std::vector<std::size_t> deg(n, 0);
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n)
      throw input_error("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                        ") has endpoint out of range");
    if (e.u == e.v) throw input_error("self-loop at vertex " + std::to_string(e.u));
    ++deg[e.u];
    ++deg[e.v];
  }

  g.offsets_.assign(n + 1, 0);
  for (Vertex v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
  g.adjacency_.resize(2 * edges.size());

  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : edges) {
    g.adjacency_[fill[e.u]++] = e.v;
    g.adjacency_[fill[e.v]++] = e.u;
  }
  for (Vertex v = 0; v < n; ++v) {
    auto begin = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
    auto end = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
    std::sort(begin, end);
    if (std::adjacent_find(begin, end) != end)
      throw input_error("duplicate edge at vertex " + std::to_string(v));
  }

  g.upper_base_.assign(n + 1, 0);
  for (Vertex v = 0; v < n; ++v) {
    const auto nbrs = g.neighbors(v);
    const auto first_upper =
        std::upper_bound(nbrs.begin(), nbrs.end(), v) - nbrs.begin();
    g.upper_base_[v + 1] =
        g.upper_base_[v] + (nbrs.size() - static_cast<std::size_t>(first_upper));
  }
  return g;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  check_vertex(u);
  check_vertex(v);
  if (u == v) return false;
  const auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::size_t Graph::edge_id(Vertex u, Vertex v) const {
  if (u > v) std::swap(u, v);
  const auto nbrs = neighbors(u);
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
  if (it == nbrs.end() || *it != v)
    throw input_error("edge (" + std::to_string(u) + "," + std::to_string(v) +
                      ") not in graph");
  const auto first_upper = std::upper_bound(nbrs.begin(), nbrs.end(), u);
  return upper_base_[u] + static_cast<std::size_t>(it - first_upper);
}

Edge Graph::edge_at(std::size_t id) const {
  if (id >= m_) throw input_error("edge id " + std::to_string(id) + " out of range");
  const auto it = std::upper_bound(upper_base_.begin(), upper_base_.end(), id);
  const Vertex u = static_cast<Vertex>(it - upper_base_.begin()) - 1;
  const auto nbrs = neighbors(u);
  const auto first_upper = std::upper_bound(nbrs.begin(), nbrs.end(), u);
  return {u, *(first_upper + static_cast<std::ptrdiff_t>(id - upper_base_[u]))};
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(m_);
  for (Vertex u = 0; u < n_; ++u)
    for (Vertex v : neighbors(u))
      if (u < v) out.push_back({u, v});
  return out;
}

std::vector<Vertex> neighborhood_of_set(const Graph& g, std::span<const Vertex> s) {
  std::vector<std::uint8_t> in_set(g.vertex_count(), 0);
  for (Vertex v : s) {
    if (v >= g.vertex_count())
      throw input_error("set member " + std::to_string(v) + " out of range");
    in_set[v] = 1;
  }
  std::vector<std::uint8_t> seen(g.vertex_count(), 0);
  std::vector<Vertex> out;
  for (Vertex v : s)
    for (Vertex w : g.neighbors(v))
      if (!in_set[w] && !seen[w]) {
        seen[w] = 1;
        out.push_back(w);
      }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace percolade
