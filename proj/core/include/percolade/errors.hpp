#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace percolade {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller handed us values outside an operation's domain.
struct input_error : error {
  using error::error;
};

// Text-format violation; remembers the offending 1-based line.
struct parse_error : error {
  parse_error(std::size_t line_no, const std::string& what_arg)
      : error("line " + std::to_string(line_no) + ": " + what_arg), line(line_no) {}
  std::size_t line;
};

// Requested (p, p2) pair admits no valid first-layer probability.
struct infeasible_split_error : input_error {
  using input_error::input_error;
};

// Random-regular construction exhausted its retry budget.
struct generation_error : error {
  using error::error;
};

// Exact certification would enumerate more subsets than allowed.
struct budget_error : error {
  using error::error;
};

// Operation applied to a state that cannot accept it (finished run, ...).
struct state_error : error {
  using error::error;
};

// Serialized artifact has an unknown schema version or a broken shape.
struct schema_error : error {
  using error::error;
};

// Internal consistency check failed; a bug, not bad input.
struct engine_error : error {
  using error::error;
};

}  // namespace percolade
