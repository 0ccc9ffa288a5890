#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "percolade/errors.hpp"

namespace percolade {

using Vertex = std::uint32_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable simple undirected graph. Vertex ids 0..n-1 double as the total
// vertex order used by the search; adjacency lists are strictly increasing.
class Graph {
 public:
  Graph() = default;

  // Validates: ids < n, no self-loops, no duplicates (in either orientation).
  static Graph from_edge_list(Vertex n, const std::vector<Edge>& edges);

  Vertex vertex_count() const { return n_; }
  std::size_t edge_count() const { return m_; }

  std::span<const Vertex> neighbors(Vertex v) const {
    check_vertex(v);
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  std::size_t degree(Vertex v) const {
    check_vertex(v);
    return offsets_[v + 1] - offsets_[v];
  }

  bool has_edge(Vertex u, Vertex v) const;

  // Canonical index of an edge within the sorted (u < v) edge list.
  std::size_t edge_id(Vertex u, Vertex v) const;
  Edge edge_at(std::size_t id) const;

  std::vector<Edge> edge_list() const;

  double average_degree() const {
    return n_ == 0 ? 0.0 : 2.0 * static_cast<double>(m_) / static_cast<double>(n_);
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.adjacency_ == b.adjacency_ && a.offsets_ == b.offsets_;
  }

 private:
  void check_vertex(Vertex v) const {
    if (v >= n_) throw input_error("vertex id " + std::to_string(v) + " out of range");
  }

  Vertex n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::size_t> offsets_;    // n + 1
  std::vector<Vertex> adjacency_;       // 2m, sorted within each vertex
  std::vector<std::size_t> upper_base_; // per-vertex cumulative count of neighbors > u
};

// Vertices outside `s` adjacent to at least one member of `s`, sorted.
std::vector<Vertex> neighborhood_of_set(const Graph& g, std::span<const Vertex> s);

}  // namespace percolade
