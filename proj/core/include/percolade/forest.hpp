#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "percolade/graph.hpp"

namespace percolade {

// Rooted forest over vertices 0..n-1, stored as parent pointers plus child
// lists. Edges are only ever added (never removed), one per non-root vertex.
class Forest {
 public:
  static constexpr Vertex npos = std::numeric_limits<Vertex>::max();

  Forest() = default;
  explicit Forest(Vertex n) : parent_(n, npos), children_(n) {}

  Vertex size() const { return static_cast<Vertex>(parent_.size()); }
  std::size_t edge_count() const { return edges_; }

  // `child` must currently be a root and must not be an ancestor of `parent`;
  // the search engine only ever attaches fresh leaves, which satisfies both.
  void set_parent(Vertex child, Vertex parent);

  Vertex parent(Vertex v) const { return parent_[v]; }
  bool is_root(Vertex v) const { return parent_[v] == npos; }
  std::span<const Vertex> children(Vertex v) const { return children_[v]; }

  bool edge_between(Vertex a, Vertex b) const {
    return parent_[a] == b || parent_[b] == a;
  }

  Vertex root_of(Vertex v) const {
    while (parent_[v] != npos) v = parent_[v];
    return v;
  }

  std::size_t depth_of(Vertex v) const {
    std::size_t d = 0;
    while (parent_[v] != npos) {
      v = parent_[v];
      ++d;
    }
    return d;
  }

  // Unique x..y path (inclusive), or nullopt when they sit in different trees.
  std::optional<std::vector<Vertex>> path(Vertex x, Vertex y) const;

  // Edges as (min, max) pairs, sorted; for audits and serialization.
  std::vector<Edge> edges() const;

  // Walks every parent chain; throws engine_error on a cycle or on an edge
  // count that disagrees with the pointers.
  void validate() const;

 private:
  std::vector<Vertex> parent_;
  std::vector<std::vector<Vertex>> children_;
  std::size_t edges_ = 0;
};

// Frozen view answering forest distances in O(log n) via binary lifting.
class ForestIndex {
 public:
  explicit ForestIndex(const Forest& f);

  Vertex component(Vertex v) const { return comp_[v]; }
  std::size_t depth(Vertex v) const { return depth_[v]; }
  // nullopt when x and y lie in different trees.
  std::optional<std::size_t> distance(Vertex x, Vertex y) const;

 private:
  Vertex ancestor(Vertex v, std::size_t steps) const;

  std::vector<Vertex> comp_;
  std::vector<std::uint32_t> depth_;
  std::vector<std::vector<Vertex>> up_;  // up_[j][v] = 2^j-th ancestor
};

}  // namespace percolade
