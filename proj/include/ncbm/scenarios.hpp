#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncbm/behavior.hpp"
#include "ncbm/correlation.hpp"

namespace ncbm {

// The four survivability experiments. Each fixes some parameters to zero and
// sweeps one: Forwarding sweeps b, Dropping sweeps a, Injection sweeps c,
// Loss sweeps d.
enum class Scenario { Forwarding, Dropping, Injection, Loss };

enum class SurvivabilityMetric { ClusterChain, IndependenceProduct, Both };

const char* name(Scenario s);
const char* swept_param_name(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view token);
std::optional<SurvivabilityMetric> parse_metric(std::string_view token);

// Scenario constraints applied to a template: Forwarding/Dropping force
// c = d = e = 0, Injection forces a = d = 0, Loss forces a = c = 0.
BehaviorParams apply_scenario_constraints(Scenario scenario, BehaviorParams params);

struct SweepConfig {
  Scenario scenario = Scenario::Dropping;
  std::vector<int> node_counts{5, 15, 25, 50};
  int grid = 50;
  // Template for the non-swept parameters; only a, b, e survive the scenario
  // constraints. The defaults are tool defaults.
  BehaviorParams fixed_params{0.2, 0.2, 0.0, 0.0, 0.3, 10.0};
  std::uint64_t horizon_steps = 100;
  SurvivabilityMetric metric = SurvivabilityMetric::Both;
};

struct SurvivabilityValue {
  double cluster = 0.0;      // NaN when the metric excludes it
  double independent = 0.0;  // NaN when the metric excludes it
};

// Probability the system is still all-cooperative after horizon_steps
// embedded steps, started cooperative.
//   ClusterChain: S0 occupancy of the m-member composed cluster chain.
//   IndependenceProduct: (single-node W occupancy)^m.
// The transient reading is deliberate: every scenario pins some parameter to
// zero, which makes the stationary value degenerate (0 or 1).
SurvivabilityValue survivability(const BehaviorParams& params, int m, std::uint64_t horizon_steps,
                                 SurvivabilityMetric metric = SurvivabilityMetric::Both);

struct SweepRow {
  Scenario scenario;
  int m;
  double param_value;
  double surv_cluster;
  double surv_independent;
  std::uint64_t horizon_steps;
};

struct SweepResult {
  SweepConfig config;
  std::string param_name;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<SweepRow> rows;  // node_count major, grid point minor
};

// Uniform grid over the swept parameter's feasible range [0, cap], where the
// cap shrinks so both TPM rows stay stochastic. Throws InfeasibleSweepError
// when the range is empty.
SweepResult run_sweep(const SweepConfig& config);

}  // namespace ncbm
