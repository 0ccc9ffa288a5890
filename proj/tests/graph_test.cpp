#include <doctest.h>

#include <algorithm>
#include <set>

#include "percolade/errors.hpp"
#include "percolade/graph.hpp"
#include "percolade/rng.hpp"

#include "helpers.hpp"

using namespace percolade;

TEST_CASE("from_edge_list builds sorted adjacency and symmetric lookups") {
  const Graph g = Graph::from_edge_list(5, {{3, 1}, {0, 2}, {0, 1}, {2, 4}});
  CHECK(g.vertex_count() == 5);
  CHECK(g.edge_count() == 4);

  const auto n0 = g.neighbors(0);
  REQUIRE(n0.size() == 2);
  CHECK(n0[0] == 1);
  CHECK(n0[1] == 2);
  CHECK(g.degree(1) == 2);
  CHECK(g.degree(4) == 1);

  CHECK(g.has_edge(1, 3));
  CHECK(g.has_edge(3, 1));
  CHECK_FALSE(g.has_edge(0, 4));
  CHECK_FALSE(g.has_edge(2, 2));
  CHECK(g.average_degree() == doctest::Approx(8.0 / 5.0));
}

TEST_CASE("from_edge_list rejects malformed input") {
  CHECK_THROWS_AS(Graph::from_edge_list(3, {{1, 1}}), input_error);
  CHECK_THROWS_AS(Graph::from_edge_list(3, {{0, 3}}), input_error);
  CHECK_THROWS_AS(Graph::from_edge_list(3, {{0, 1}, {0, 1}}), input_error);
  CHECK_THROWS_AS(Graph::from_edge_list(3, {{0, 1}, {1, 0}}), input_error);
  CHECK_THROWS_AS(Graph::from_edge_list(0, {{0, 1}}), input_error);
}

TEST_CASE("edge ids enumerate the sorted edge list exactly once") {
  const Graph g = testutil::complete_fixture(6);
  const auto edges = g.edge_list();
  REQUIRE(edges.size() == 15);
  CHECK(std::is_sorted(edges.begin(), edges.end()));

  std::set<std::size_t> ids;
  for (const Edge& e : edges) {
    const std::size_t id = g.edge_id(e.u, e.v);
    CHECK(id == g.edge_id(e.v, e.u));
    CHECK(g.edge_at(id) == e);
    ids.insert(id);
  }
  CHECK(ids.size() == edges.size());
  CHECK(*ids.begin() == 0);
  CHECK(*ids.rbegin() == edges.size() - 1);

  CHECK_THROWS_AS(g.edge_id(0, 0), input_error);
  CHECK_THROWS_AS(g.edge_at(15), input_error);
}

TEST_CASE("edge_id rejects absent pairs") {
  const Graph g = testutil::path_graph(4);
  CHECK(g.edge_id(1, 0) == 0);
  CHECK_THROWS_AS(g.edge_id(0, 2), input_error);
  CHECK_THROWS_AS(g.edge_id(0, 9), input_error);
}

TEST_CASE("vertex access beyond n throws") {
  const Graph g = testutil::path_graph(3);
  CHECK_THROWS_AS(g.neighbors(3), input_error);
  CHECK_THROWS_AS(g.degree(7), input_error);
}

TEST_CASE("neighborhood_of_set agrees with a set-based recomputation") {
  RandomStream rng(2024, StreamClass::Generator, 50);
  for (int round = 0; round < 60; ++round) {
    const Vertex n = static_cast<Vertex>(2 + rng.next_below(9));
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v)
        if (rng.next_unit() < 0.4) edges.push_back({u, v});
    const Graph g = Graph::from_edge_list(n, edges);

    std::vector<Vertex> subset;
    for (Vertex v = 0; v < n; ++v)
      if (rng.next_unit() < 0.35) subset.push_back(v);

    std::set<Vertex> expect;
    std::set<Vertex> inside(subset.begin(), subset.end());
    for (Vertex v : subset)
      for (Vertex w : g.neighbors(v))
        if (!inside.count(w)) expect.insert(w);

    const auto got = neighborhood_of_set(g, subset);
    CHECK(std::is_sorted(got.begin(), got.end()));
    CHECK(got == std::vector<Vertex>(expect.begin(), expect.end()));
  }
}

TEST_CASE("graph equality tracks structure, not construction order") {
  const Graph a = Graph::from_edge_list(4, {{0, 1}, {2, 3}});
  const Graph b = Graph::from_edge_list(4, {{2, 3}, {0, 1}});
  const Graph c = Graph::from_edge_list(4, {{0, 1}, {1, 2}});
  CHECK(a == b);
  CHECK_FALSE(a == c);
}
