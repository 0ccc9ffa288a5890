#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "percolade/graph.hpp"
#include "percolade/rng.hpp"

namespace percolade {

// Two-round split of an edge probability p: reveal at rate p1 first, sprinkle
// the remainder at rate p2, so that 1 - p = (1 - p1)(1 - p2).
struct SprinklingSplit {
  double p = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

// Solves for p1 given (p, p2). p = 1 with p2 < 1 is rejected; at p2 = p the
// first layer carries nothing.
SprinklingSplit split_probability(double p, double p2);

// Solves for p2 given (p, p1); the derivation used by config defaults.
SprinklingSplit split_from_phase1(double p, double p1);

// Both layers certain; the p = 1 endpoint.
SprinklingSplit saturated_split();

// Lazy two-layer reveal over a fixed ambient graph. Layer 1 consumes one
// Bernoulli(p1) draw per *fresh* query from the stream of the block doing the
// asking; repeats are memoized and consume nothing. Layer 2 draws are keyed by
// edge id, independent of everything in layer 1.
class EdgeOracle {
 public:
  EdgeOracle(const Graph& g, SprinklingSplit split, std::uint64_t seed);

  // block_index is 1-based.
  bool query_layer1(Edge e, std::uint32_t block_index);
  bool query_layer2(Edge e);

  std::optional<bool> layer1_memo(Edge e) const;
  std::optional<bool> layer2_memo(Edge e) const;

  // Fresh layer-1 outcomes consumed by one block, in consumption order.
  std::span<const std::uint8_t> block_outcomes(std::uint32_t block_index) const;
  std::uint32_t highest_block() const { return static_cast<std::uint32_t>(blocks_.size()); }
  std::uint64_t fresh_layer1_queries() const { return fresh_layer1_; }

  // All queried edges with outcomes, in canonical edge-id order.
  std::vector<std::pair<Edge, bool>> layer1_queries() const;
  std::vector<std::pair<Edge, bool>> layer2_queries() const;

  const Graph& graph() const { return *graph_; }
  const SprinklingSplit& split() const { return split_; }
  std::uint64_t seed() const { return seed_; }

 private:
  const Graph* graph_;
  SprinklingSplit split_;
  std::uint64_t seed_;
  std::vector<std::int8_t> memo1_;  // -1 unknown, else 0/1
  std::vector<std::int8_t> memo2_;
  std::vector<std::vector<std::uint8_t>> blocks_;  // [block-1] -> outcomes
  std::uint64_t fresh_layer1_ = 0;
};

// Eager single-layer percolation; independent of any oracle stream.
Graph percolate_full(const Graph& g, double p, std::uint64_t seed);

}  // namespace percolade
