#pragma once

#include <span>
#include <string>

#include "percolade/serialize.hpp"

namespace percolade {

// Two stacked panels over the sweep's p axis: cycle-find rate with its 95%
// band, and mean extracted cycle length with a 2-standard-error band. Pure
// text output, no external references, byte-deterministic in the rows.
std::string sweep_chart_svg(std::span<const SweepRow> rows, const std::string& title);

}  // namespace percolade
