#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ncbm/behavior.hpp"

namespace ncbm {

// One interval of a node's traffic/energy log. Packet counters are stored as
// doubles: the estimation formulas are ratio-based and the log format accepts
// fractional counts (e.g. averaged intervals).
struct TrafficRecord {
  std::string node_id;
  std::int64_t interval_index = 0;
  double pkts_forwarded = 0.0;
  double pkts_received = 0.0;
  double remaining_power = 0.0;         // energy units
  double power_consumption_rate = 0.0;  // energy units per time unit
  double initial_energy = 0.0;          // energy units
  std::vector<double> recovery_durations;  // time units; empty if never failed
};

struct LifetimeStats {
  double avg_lifetime = 0.0;  // L_bar = remaining power / consumption rate
  double t_selfish = 0.0;     // (1 - 1/eta) * L_bar
};

// Throws ValidationError for rate <= 0 (ZeroConsumptionRate) or eta <= 1.
LifetimeStats lifetime(const TrafficRecord& record, double eta);

// Raw parameter estimates straight from the formulas, unclamped. Parameters
// whose denominator was zero are NaN and listed in division_by_zero.
struct RawEstimate {
  double a = 0.0;  // eta / ((eta-1) * L_bar)
  double b = 0.0;  // forwarded / received
  double c = 0.0;  // received / forwarded
  double d = 0.0;  // b / (forwarded + received)
  double e = 0.0;  // 1 / mean(recovery_durations), 0 if the node never failed
  LifetimeStats life;
  std::vector<std::string> flags;             // e.g. "no_recovery_observed", "raw_out_of_range:c"
  std::vector<std::string> division_by_zero;  // parameter names with zero denominators
  bool ok() const { return division_by_zero.empty(); }
};

RawEstimate estimate_params(const TrafficRecord& record, double eta);

// Merges multiple intervals of one node: counters and recovery durations are
// summed/concatenated in interval order and the energy snapshot is the last
// interval's. Throws ValidationError on mixed node ids or empty input.
TrafficRecord aggregate_records(std::span<const TrafficRecord> records);

struct Adjustment {
  std::string what;  // "c_clamped", "row_W_scaled", ...
  double before = 0.0;
  double after = 0.0;
};

struct FeasibleProjection {
  BehaviorParams params;
  std::vector<Adjustment> adjustments;  // empty when the raw values were already feasible
};

// Clamp each raw value to [0,1], then scale the worse-violating row triple
// (a,c,d) or (b,c,d) by (1-eps)/rowsum with eps = 1e-9, re-checking the other
// row. Total on nonnegative input; output always passes validate_params and
// the projection is idempotent.
FeasibleProjection project_feasible(double a, double b, double c, double d, double e, double eta);

}  // namespace ncbm
