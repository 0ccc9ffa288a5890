#include "percolade/percolation.hpp"

#include <algorithm>
#include <cmath>

#include "percolade/errors.hpp"

namespace percolade {
namespace {

void check_probability(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0))
    throw input_error(std::string(name) + " must lie in [0,1]");
}

}  // namespace

SprinklingSplit split_probability(double p, double p2) {
  check_probability(p, "p");
  check_probability(p2, "p2");
  if (p2 > p) throw input_error("p2 must not exceed p");
  if (p == 1.0) {
    if (p2 < 1.0)
      throw infeasible_split_error("p = 1 requires p2 = 1 when deriving the first layer");
    return {1.0, 0.0, 1.0};  // all probability in layer 2
  }
  const double p1 = std::max(0.0, (p - p2) / (1.0 - p2));
  return {p, p1, p2};
}

SprinklingSplit split_from_phase1(double p, double p1) {
  check_probability(p, "p");
  check_probability(p1, "p1");
  if (p1 > p) throw input_error("p1 must not exceed p");
  if (p1 == 1.0) return saturated_split();
  const double p2 = std::max(0.0, (p - p1) / (1.0 - p1));
  return {p, p1, p2};
}

SprinklingSplit saturated_split() { return {1.0, 1.0, 1.0}; }

EdgeOracle::EdgeOracle(const Graph& g, SprinklingSplit split, std::uint64_t seed)
    : graph_(&g), split_(split), seed_(seed) {
  check_probability(split.p, "p");
  check_probability(split.p1, "p1");
  check_probability(split.p2, "p2");
  memo1_.assign(g.edge_count(), -1);
  memo2_.assign(g.edge_count(), -1);
}

bool EdgeOracle::query_layer1(Edge e, std::uint32_t block_index) {
  if (block_index == 0) throw input_error("block index is 1-based");
  const std::size_t id = graph_->edge_id(e.u, e.v);
  if (memo1_[id] >= 0) return memo1_[id] != 0;
  if (blocks_.size() < block_index) blocks_.resize(block_index);
  auto& outcomes = blocks_[block_index - 1];
  const bool value = draw::bernoulli(split_.p1, seed_, StreamClass::DfsQueries,
                                     block_index, outcomes.size());
  outcomes.push_back(value ? 1 : 0);
  ++fresh_layer1_;
  memo1_[id] = value ? 1 : 0;
  return value;
}

bool EdgeOracle::query_layer2(Edge e) {
  const std::size_t id = graph_->edge_id(e.u, e.v);
  if (memo2_[id] >= 0) return memo2_[id] != 0;
  const bool value = draw::bernoulli(split_.p2, seed_, StreamClass::Sprinkle, id, 0);
  memo2_[id] = value ? 1 : 0;
  return value;
}

std::optional<bool> EdgeOracle::layer1_memo(Edge e) const {
  const std::int8_t m = memo1_[graph_->edge_id(e.u, e.v)];
  if (m < 0) return std::nullopt;
  return m != 0;
}

std::optional<bool> EdgeOracle::layer2_memo(Edge e) const {
  const std::int8_t m = memo2_[graph_->edge_id(e.u, e.v)];
  if (m < 0) return std::nullopt;
  return m != 0;
}

std::span<const std::uint8_t> EdgeOracle::block_outcomes(std::uint32_t block_index) const {
  if (block_index == 0) throw input_error("block index is 1-based");
  if (block_index > blocks_.size()) return {};
  return blocks_[block_index - 1];
}

std::vector<std::pair<Edge, bool>> EdgeOracle::layer1_queries() const {
  std::vector<std::pair<Edge, bool>> out;
  for (std::size_t id = 0; id < memo1_.size(); ++id)
    if (memo1_[id] >= 0) out.emplace_back(graph_->edge_at(id), memo1_[id] != 0);
  return out;
}

std::vector<std::pair<Edge, bool>> EdgeOracle::layer2_queries() const {
  std::vector<std::pair<Edge, bool>> out;
  for (std::size_t id = 0; id < memo2_.size(); ++id)
    if (memo2_[id] >= 0) out.emplace_back(graph_->edge_at(id), memo2_[id] != 0);
  return out;
}

Graph percolate_full(const Graph& g, double p, std::uint64_t seed) {
  check_probability(p, "p");
  std::vector<Edge> kept;
  const auto edges = g.edge_list();
  for (std::size_t id = 0; id < edges.size(); ++id)
    if (draw::bernoulli(p, seed, StreamClass::FullPercolation, id, 0))
      kept.push_back(edges[id]);
  return Graph::from_edge_list(g.vertex_count(), kept);
}

}  // namespace percolade
