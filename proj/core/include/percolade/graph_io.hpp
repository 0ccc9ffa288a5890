#pragma once

#include <iosfwd>
#include <string>

#include "percolade/graph.hpp"

namespace percolade {

// Text format: first line "n m", then m lines "u v" with 0 <= u < v < n,
// each edge exactly once, ASCII decimal, LF-terminated.
Graph load_graph(std::istream& in);
void save_graph(const Graph& g, std::ostream& out);

Graph load_graph_file(const std::string& path);
void save_graph_file(const Graph& g, const std::string& path);

}  // namespace percolade
