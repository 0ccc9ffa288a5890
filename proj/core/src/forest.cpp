#include "percolade/forest.hpp"

#include <algorithm>

#include "percolade/errors.hpp"

namespace percolade {

void Forest::set_parent(Vertex child, Vertex parent) {
  if (child >= size() || parent >= size()) throw input_error("forest vertex out of range");
  if (child == parent) throw input_error("forest self-edge");
  if (parent_[child] != npos) throw state_error("vertex already has a parent");
  parent_[child] = parent;
  children_[parent].push_back(child);
  ++edges_;
}

std::optional<std::vector<Vertex>> Forest::path(Vertex x, Vertex y) const {
  if (x >= size() || y >= size()) throw input_error("forest vertex out of range");
  if (x == y) return std::vector<Vertex>{x};

  std::size_t dx = depth_of(x);
  std::size_t dy = depth_of(y);
  std::vector<Vertex> from_x{x};
  std::vector<Vertex> from_y{y};
  Vertex a = x;
  Vertex b = y;
  while (dx > dy) {
    a = parent_[a];
    from_x.push_back(a);
    --dx;
  }
  while (dy > dx) {
    b = parent_[b];
    from_y.push_back(b);
    --dy;
  }
  while (a != b) {
    if (parent_[a] == npos) return std::nullopt;  // different trees
    a = parent_[a];
    b = parent_[b];
    from_x.push_back(a);
    from_y.push_back(b);
  }
  // from_x ends at the meeting vertex; append from_y in reverse, skipping it.
  from_x.insert(from_x.end(), from_y.rbegin() + 1, from_y.rend());
  return from_x;
}

std::vector<Edge> Forest::edges() const {
  std::vector<Edge> out;
  out.reserve(edges_);
  for (Vertex v = 0; v < size(); ++v)
    if (parent_[v] != npos)
      out.push_back({std::min(v, parent_[v]), std::max(v, parent_[v])});
  std::sort(out.begin(), out.end());
  return out;
}

void Forest::validate() const {
  std::size_t with_parent = 0;
  for (Vertex v = 0; v < size(); ++v) {
    if (parent_[v] == npos) continue;
    ++with_parent;
    Vertex walk = v;
    std::size_t steps = 0;
    while (parent_[walk] != npos) {
      walk = parent_[walk];
      if (++steps > size()) throw engine_error("cycle through vertex " + std::to_string(v));
    }
  }
  if (with_parent != edges_) throw engine_error("edge count mismatch");
}

ForestIndex::ForestIndex(const Forest& f) {
  const Vertex n = f.size();
  comp_.assign(n, Forest::npos);
  depth_.assign(n, 0);

  // Iterative depth/component fill, leaf chains can be long.
  std::vector<Vertex> stack;
  for (Vertex r = 0; r < n; ++r) {
    if (!f.is_root(r)) continue;
    comp_[r] = r;
    depth_[r] = 0;
    stack.push_back(r);
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      for (Vertex c : f.children(v)) {
        comp_[c] = r;
        depth_[c] = depth_[v] + 1;
        stack.push_back(c);
      }
    }
  }

  std::uint32_t max_depth = 0;
  for (Vertex v = 0; v < n; ++v) max_depth = std::max(max_depth, depth_[v]);
  std::size_t levels = 1;
  while ((std::size_t{1} << levels) <= max_depth) ++levels;

  up_.assign(levels, std::vector<Vertex>(n, Forest::npos));
  for (Vertex v = 0; v < n; ++v) up_[0][v] = f.parent(v);
  for (std::size_t j = 1; j < levels; ++j)
    for (Vertex v = 0; v < n; ++v) {
      const Vertex mid = up_[j - 1][v];
      up_[j][v] = mid == Forest::npos ? Forest::npos : up_[j - 1][mid];
    }
}

Vertex ForestIndex::ancestor(Vertex v, std::size_t steps) const {
  for (std::size_t j = 0; steps != 0 && v != Forest::npos; ++j, steps >>= 1)
    if (steps & 1) v = up_[j][v];
  return v;
}

std::optional<std::size_t> ForestIndex::distance(Vertex x, Vertex y) const {
  if (x >= comp_.size() || y >= comp_.size()) throw input_error("vertex out of range");
  if (comp_[x] != comp_[y]) return std::nullopt;
  if (x == y) return 0;

  const std::size_t dx = depth_[x];
  const std::size_t dy = depth_[y];
  Vertex a = x;
  Vertex b = y;
  if (dx > dy) a = ancestor(a, dx - dy);
  if (dy > dx) b = ancestor(b, dy - dx);
  std::size_t lifted = 0;
  if (a != b) {
    for (std::size_t j = up_.size(); j-- > 0;) {
      if (up_[j][a] != up_[j][b]) {
        a = up_[j][a];
        b = up_[j][b];
        lifted += std::size_t{1} << j;
      }
    }
    a = up_[0][a];
    lifted += 1;
  }
  const std::size_t depth_lca = std::min(dx, dy) - lifted;
  return dx + dy - 2 * depth_lca;
}

}  // namespace percolade
