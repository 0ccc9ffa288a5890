#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "percolade/graph.hpp"

namespace percolade {

Graph gen_complete(Vertex n);

// Sides are {0..a-1} and {a..a+b-1}.
Graph gen_complete_bipartite(Vertex a, Vertex b);

// Pairing model: match degree stubs uniformly, redraw pairs that would form a
// loop or a repeated edge, restart when the remaining stubs admit no legal
// pair. Deterministic in `seed`.
Graph gen_random_regular(Vertex n, Vertex r, std::uint64_t seed,
                         unsigned max_restarts = 1000);

enum class ExpansionStatus : std::uint8_t {
  CertifiedExact,
  Refuted,
  PlausibleSampled,
};

struct ExpansionVerdict {
  ExpansionStatus status = ExpansionStatus::PlausibleSampled;
  // Populated iff refuted: a k-set whose outside neighborhood is below d*k.
  std::optional<std::vector<Vertex>> witness;
  std::uint64_t checked_subsets = 0;
};

// Enumerates every k-subset in lexicographic order; the first violator (hence
// the lexicographically least) becomes the witness. Throws budget_error when
// C(n, k) exceeds `subset_budget`.
ExpansionVerdict certify_exact(const Graph& g, Vertex k, double d,
                               std::uint64_t subset_budget = 2'000'000);

// Samples `trials` k-subsets: a greedy lowest-degree set first, then a mix of
// uniform and low-degree-biased draws. Can refute, never certify.
ExpansionVerdict certify_sampled(const Graph& g, Vertex k, double d,
                                 std::uint64_t trials, std::uint64_t seed);

}  // namespace percolade
