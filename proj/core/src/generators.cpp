#include "percolade/generators.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "percolade/errors.hpp"
#include "percolade/rng.hpp"

namespace percolade {

Graph gen_complete(Vertex n) {
  if (n == 0) throw input_error("complete graph needs n >= 1");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
  return Graph::from_edge_list(n, edges);
}

Graph gen_complete_bipartite(Vertex a, Vertex b) {
  if (a == 0 || b == 0) throw input_error("bipartite sides must be >= 1");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(a) * b);
  for (Vertex u = 0; u < a; ++u)
    for (Vertex v = a; v < a + b; ++v) edges.push_back({u, v});
  return Graph::from_edge_list(a + b, edges);
}

Graph gen_random_regular(Vertex n, Vertex r, std::uint64_t seed, unsigned max_restarts) {
  if (n == 0) throw input_error("regular graph needs n >= 1");
  if (r >= n) throw input_error("degree must satisfy r < n");
  if ((static_cast<std::uint64_t>(n) * r) % 2 != 0)
    throw input_error("n * r must be even");
  if (r == 0) return Graph::from_edge_list(n, {});

  RandomStream rng(seed, StreamClass::Generator, 0);

  for (unsigned attempt = 0; attempt < max_restarts; ++attempt) {
    std::vector<Vertex> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * r);
    for (Vertex v = 0; v < n; ++v)
      for (Vertex i = 0; i < r; ++i) stubs.push_back(v);

    std::unordered_set<std::uint64_t> used;
    used.reserve(stubs.size());
    std::vector<Edge> edges;
    edges.reserve(stubs.size() / 2);

    auto key = [](Vertex a, Vertex b) {
      if (a > b) std::swap(a, b);
      return std::uint64_t{a} << 32 | b;
    };

    bool stuck = false;
    std::size_t rejects = 0;
    while (!stubs.empty()) {
      const std::size_t i = rng.next_below(stubs.size());
      std::size_t j = rng.next_below(stubs.size() - 1);
      if (j >= i) ++j;
      const Vertex a = stubs[i];
      const Vertex b = stubs[j];
      if (a == b || used.count(key(a, b))) {
        // Redraw; when rejects pile up, scan for any legal pair before giving up.
        if (++rejects > 100 + 10 * stubs.size()) {
          bool suitable = false;
          for (std::size_t x = 0; x < stubs.size() && !suitable; ++x)
            for (std::size_t y = x + 1; y < stubs.size(); ++y)
              if (stubs[x] != stubs[y] && !used.count(key(stubs[x], stubs[y]))) {
                suitable = true;
                break;
              }
          if (!suitable) {
            stuck = true;
            break;
          }
          rejects = 0;
        }
        continue;
      }
      used.insert(key(a, b));
      edges.push_back({std::min(a, b), std::max(a, b)});
      // Remove both stubs, larger index first.
      const std::size_t hi = std::max(i, j);
      const std::size_t lo = std::min(i, j);
      stubs[hi] = stubs.back();
      stubs.pop_back();
      stubs[lo] = stubs.back();
      stubs.pop_back();
      rejects = 0;
    }
    if (!stuck) return Graph::from_edge_list(n, edges);
  }
  throw generation_error("random regular generation exhausted " +
                         std::to_string(max_restarts) + " restarts");
}

namespace {

// C(n, k) clamped at `cap` to avoid overflow.
std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    if (result > cap) return cap + 1;
    // result * (n - k + i) / i is integral at every step
    result = result / i * (n - k + i) + result % i * (n - k + i) / i;
  }
  return std::min(result, cap + 1);
}

bool violates(const Graph& g, const std::vector<Vertex>& subset, double d, Vertex k) {
  const auto nbhd = neighborhood_of_set(g, subset);
  return static_cast<double>(nbhd.size()) < d * static_cast<double>(k);
}

}  // namespace

ExpansionVerdict certify_exact(const Graph& g, Vertex k, double d,
                               std::uint64_t subset_budget) {
  const Vertex n = g.vertex_count();
  if (k == 0 || k > n) throw input_error("certify: need 1 <= k <= n");
  if (d <= 0.0) throw input_error("certify: need d > 0");
  const std::uint64_t budget = std::min(subset_budget, std::uint64_t{1} << 40);
  if (binomial_capped(n, k, budget) > budget)
    throw budget_error("C(n,k) exceeds enumeration budget of " + std::to_string(budget) +
                       " subsets");

  std::vector<Vertex> subset(k);
  std::iota(subset.begin(), subset.end(), 0);
  ExpansionVerdict verdict;
  while (true) {
    ++verdict.checked_subsets;
    if (violates(g, subset, d, k)) {
      verdict.status = ExpansionStatus::Refuted;
      verdict.witness = subset;
      return verdict;
    }
    // Next combination in lexicographic order.
    Vertex i = k;
    while (i > 0 && subset[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (Vertex j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  verdict.status = ExpansionStatus::CertifiedExact;
  return verdict;
}

ExpansionVerdict certify_sampled(const Graph& g, Vertex k, double d,
                                 std::uint64_t trials, std::uint64_t seed) {
  const Vertex n = g.vertex_count();
  if (k == 0 || k > n) throw input_error("certify: need 1 <= k <= n");
  if (d <= 0.0) throw input_error("certify: need d > 0");
  if (trials == 0) throw input_error("certify_sampled: trials must be >= 1");

  RandomStream rng(seed, StreamClass::Sampler, 0);
  ExpansionVerdict verdict;

  std::vector<Vertex> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](Vertex a, Vertex b) { return g.degree(a) < g.degree(b); });

  std::vector<Vertex> pool(n);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::vector<Vertex> subset;
    subset.reserve(k);
    if (trial == 0) {
      // Greedy: the k lowest-degree vertices, the cheapest place to look.
      subset.assign(by_degree.begin(), by_degree.begin() + k);
    } else if (trial % 3 == 1) {
      // Low-degree biased: draw without replacement, weight 1/(1+deg).
      std::iota(pool.begin(), pool.end(), 0);
      std::size_t remaining = n;
      for (Vertex picked = 0; picked < k; ++picked) {
        double total = 0.0;
        for (std::size_t i = 0; i < remaining; ++i)
          total += 1.0 / (1.0 + static_cast<double>(g.degree(pool[i])));
        double target = rng.next_unit() * total;
        std::size_t chosen = remaining - 1;
        for (std::size_t i = 0; i < remaining; ++i) {
          target -= 1.0 / (1.0 + static_cast<double>(g.degree(pool[i])));
          if (target <= 0.0) {
            chosen = i;
            break;
          }
        }
        subset.push_back(pool[chosen]);
        pool[chosen] = pool[--remaining];
      }
    } else {
      // Uniform k-subset via partial Fisher-Yates.
      std::iota(pool.begin(), pool.end(), 0);
      for (Vertex picked = 0; picked < k; ++picked) {
        const std::size_t i = picked + rng.next_below(n - picked);
        std::swap(pool[picked], pool[i]);
        subset.push_back(pool[picked]);
      }
    }
    std::sort(subset.begin(), subset.end());
    ++verdict.checked_subsets;
    if (violates(g, subset, d, k)) {
      verdict.status = ExpansionStatus::Refuted;
      verdict.witness = subset;
      return verdict;
    }
  }
  verdict.status = ExpansionStatus::PlausibleSampled;
  return verdict;
}

}  // namespace percolade
