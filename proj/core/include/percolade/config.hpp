#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "percolade/graph.hpp"
#include "percolade/percolation.hpp"

namespace percolade {

// Parameters of one experiment. k is the block size, d the expansion rate the
// ambient graph is assumed (or certified) to have, epsilon the slack that all
// derived constants feed on.
struct ExperimentConfig {
  std::uint32_t k = 1;
  double d = 2.0;
  double epsilon = 0.5;
  SprinklingSplit split;
  std::uint64_t seed = 0;
  std::uint32_t trials = 1;
  std::uint64_t step_budget = 0;  // 0: derive from the graph at run time

  double alpha() const { return epsilon * epsilon / 100.0; }
  double gamma() const { return epsilon * (1.0 - (1.0 + epsilon) / d) / 2.0; }
  double lambda() const { return epsilon * epsilon / 24.0; }

  // Minimum forest distance for an edge to count as long.
  double long_edge_threshold() const { return alpha() * k * d; }

  // Guarantees kick in only for epsilon >= 300 / sqrt(d).
  bool theorem_valid() const { return epsilon >= 300.0 / std::sqrt(d); }

  std::uint64_t budget_for(const Graph& g) const {
    if (step_budget != 0) return step_budget;
    const std::uint64_t n = g.vertex_count();
    const std::uint64_t m = g.edge_count();
    return std::max(std::uint64_t{10} * n, std::uint64_t{20} * m);
  }

  // Validates and fills the split. Defaults: p = (1+3eps)/d with first layer
  // (1+2eps)/d. An overridden p keeps the same layer-1:p ratio; p = 1
  // saturates both layers so the forest phase sees every edge.
  static ExperimentConfig make(std::uint32_t k, double d, double epsilon,
                               std::optional<double> p, std::optional<double> p2,
                               std::uint64_t seed, std::uint32_t trials,
                               std::uint64_t step_budget = 0);
};

}  // namespace percolade
