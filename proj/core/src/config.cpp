#include "percolade/config.hpp"

#include "percolade/errors.hpp"

namespace percolade {

ExperimentConfig ExperimentConfig::make(std::uint32_t k, double d, double epsilon,
                                        std::optional<double> p, std::optional<double> p2,
                                        std::uint64_t seed, std::uint32_t trials,
                                        std::uint64_t step_budget) {
  if (k == 0) throw input_error("k must be >= 1");
  if (!(d > 1.0)) throw input_error("expansion rate d must be > 1");
  if (!(epsilon > 0.0)) throw input_error("epsilon must be > 0");
  if (p && !(*p >= 0.0 && *p <= 1.0)) throw input_error("p must lie in [0,1]");
  if (p2 && !(*p2 >= 0.0 && *p2 <= 1.0)) throw input_error("p2 must lie in [0,1]");

  ExperimentConfig cfg;
  cfg.k = k;
  cfg.d = d;
  cfg.epsilon = epsilon;
  cfg.seed = seed;
  cfg.trials = trials;
  cfg.step_budget = step_budget;

  const double p_default = (1.0 + 3.0 * epsilon) / d;
  if (p2) {
    const double p_eff = p ? *p : p_default;
    if (!p && p_eff > 1.0)
      throw infeasible_split_error("default p = (1+3*eps)/d exceeds 1; pass p or lower eps");
    cfg.split = split_probability(p_eff, *p2);
  } else if (p) {
    if (*p == 1.0) {
      cfg.split = saturated_split();
    } else {
      // Keep the default layer-1 share of p.
      const double p1 = *p * (1.0 + 2.0 * epsilon) / (1.0 + 3.0 * epsilon);
      cfg.split = split_from_phase1(*p, p1);
    }
  } else {
    if (p_default > 1.0)
      throw infeasible_split_error("default p = (1+3*eps)/d exceeds 1; pass p or lower eps");
    cfg.split = split_from_phase1(p_default, (1.0 + 2.0 * epsilon) / d);
  }
  return cfg;
}

}  // namespace percolade
