#include "ncbm/scenarios.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ncbm/smp.hpp"

namespace ncbm {

const char* name(Scenario s) {
  switch (s) {
    case Scenario::Forwarding: return "forwarding";
    case Scenario::Dropping: return "dropping";
    case Scenario::Injection: return "injection";
    case Scenario::Loss: return "loss";
  }
  return "?";
}

const char* swept_param_name(Scenario s) {
  switch (s) {
    case Scenario::Forwarding: return "b";
    case Scenario::Dropping: return "a";
    case Scenario::Injection: return "c";
    case Scenario::Loss: return "d";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view token) {
  for (Scenario s : {Scenario::Forwarding, Scenario::Dropping, Scenario::Injection, Scenario::Loss})
    if (token == name(s)) return s;
  return std::nullopt;
}

std::optional<SurvivabilityMetric> parse_metric(std::string_view token) {
  if (token == "cluster") return SurvivabilityMetric::ClusterChain;
  if (token == "independent") return SurvivabilityMetric::IndependenceProduct;
  if (token == "both") return SurvivabilityMetric::Both;
  return std::nullopt;
}

BehaviorParams apply_scenario_constraints(Scenario scenario, BehaviorParams params) {
  switch (scenario) {
    case Scenario::Forwarding:
    case Scenario::Dropping:
      params.c = params.d = params.e = 0.0;
      break;
    case Scenario::Injection:
      params.a = params.d = 0.0;
      break;
    case Scenario::Loss:
      params.a = params.c = 0.0;
      break;
  }
  return params;
}

namespace {

BehaviorParams with_swept_value(Scenario scenario, BehaviorParams p, double value) {
  switch (scenario) {
    case Scenario::Forwarding: p.b = value; break;
    case Scenario::Dropping: p.a = value; break;
    case Scenario::Injection: p.c = value; break;
    case Scenario::Loss: p.d = value; break;
  }
  return p;
}

// Largest swept value keeping both stochastic rows (a+c+d <= 1 and b+c+d <= 1).
double swept_cap(Scenario scenario, const BehaviorParams& fixed) {
  switch (scenario) {
    case Scenario::Forwarding: return 1.0 - fixed.c - fixed.d;
    case Scenario::Dropping: return 1.0 - fixed.c - fixed.d;
    case Scenario::Injection: return std::min(1.0 - fixed.a, 1.0 - fixed.b) - fixed.d;
    case Scenario::Loss: return std::min(1.0 - fixed.a, 1.0 - fixed.b) - fixed.c;
  }
  return 0.0;
}

}  // namespace

SurvivabilityValue survivability(const BehaviorParams& params, int m, std::uint64_t horizon_steps,
                                 SurvivabilityMetric metric) {
  if (m < 1) throw ValidationError("survivability: node count m must be >= 1");
  const BehaviorParams valid = validate_params(params);
  const EmbeddedTpm tpm = build_tpm(valid);
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  SurvivabilityValue out{kNan, kNan};

  if (metric != SurvivabilityMetric::IndependenceProduct) {
    Mat4 cluster = tpm.p;
    for (int k = 1; k < m; ++k) cluster = compose_pair(cluster, tpm.p);
    out.cluster = transient_occupancy(cluster, index_of(ClusterState::S0), horizon_steps)[0];
  }
  if (metric != SurvivabilityMetric::ClusterChain) {
    const double occ_w = transient_occupancy(tpm, BehaviorState::Forward, horizon_steps)[0];
    out.independent = std::pow(occ_w, static_cast<double>(m));
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& config) {
  if (config.grid < 2) throw ValidationError("run_sweep: grid must be >= 2");
  if (config.node_counts.empty()) throw ValidationError("run_sweep: node_counts must be nonempty");
  for (int m : config.node_counts)
    if (m < 1) throw ValidationError("run_sweep: node counts must be >= 1");

  const BehaviorParams fixed =
      validate_params(apply_scenario_constraints(config.scenario, config.fixed_params));

  SweepResult result;
  result.config = config;
  result.param_name = swept_param_name(config.scenario);
  result.lo = 0.0;
  result.hi = swept_cap(config.scenario, fixed);
  if (!(result.hi > result.lo)) {
    std::ostringstream msg;
    msg << "InfeasibleGrid: fixed parameters leave no feasible range for " << result.param_name
        << " in scenario " << name(config.scenario);
    throw InfeasibleSweepError(msg.str());
  }

  result.rows.reserve(config.node_counts.size() * static_cast<std::size_t>(config.grid));
  for (int m : config.node_counts) {
    for (int g = 0; g < config.grid; ++g) {
      const double value =
          result.lo + (result.hi - result.lo) * static_cast<double>(g) /
                          static_cast<double>(config.grid - 1);
      const BehaviorParams point = with_swept_value(config.scenario, fixed, value);
      const SurvivabilityValue s = survivability(point, m, config.horizon_steps, config.metric);
      result.rows.push_back(
          {config.scenario, m, value, s.cluster, s.independent, config.horizon_steps});
    }
  }
  return result;
}

}  // namespace ncbm
