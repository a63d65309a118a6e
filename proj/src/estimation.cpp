#include "ncbm/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ncbm {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void flag_if_out_of_range(RawEstimate& est, const char* name, double value) {
  if (!std::isnan(value) && (value < 0.0 || value > 1.0))
    est.flags.push_back(std::string("raw_out_of_range:") + name);
}

}  // namespace

LifetimeStats lifetime(const TrafficRecord& record, double eta) {
  if (!(eta > 1.0)) throw ValidationError("lifetime: eta must exceed 1");
  if (!(record.power_consumption_rate > 0.0))
    throw ValidationError("ZeroConsumptionRate: power_consumption_rate must be positive");
  LifetimeStats stats;
  stats.avg_lifetime = record.remaining_power / record.power_consumption_rate;
  stats.t_selfish = (1.0 - 1.0 / eta) * stats.avg_lifetime;
  return stats;
}

RawEstimate estimate_params(const TrafficRecord& record, double eta) {
  RawEstimate est;
  est.life = lifetime(record, eta);

  const double fwd = record.pkts_forwarded;
  const double rcv = record.pkts_received;

  if (est.life.avg_lifetime > 0.0) {
    est.a = eta / ((eta - 1.0) * est.life.avg_lifetime);
  } else {
    est.a = kNan;
    est.division_by_zero.push_back("a");
  }
  if (rcv > 0.0) {
    est.b = fwd / rcv;
  } else {
    est.b = kNan;
    est.division_by_zero.push_back("b");
  }
  if (fwd > 0.0) {
    est.c = rcv / fwd;
  } else {
    est.c = kNan;
    est.division_by_zero.push_back("c");
  }
  if (fwd + rcv > 0.0) {
    est.d = est.b / (fwd + rcv);  // NaN propagates when b itself failed
  } else {
    est.d = kNan;
    est.division_by_zero.push_back("d");
  }
  if (record.recovery_durations.empty()) {
    est.e = 0.0;
    est.flags.push_back("no_recovery_observed");
  } else {
    const double total = std::accumulate(record.recovery_durations.begin(),
                                         record.recovery_durations.end(), 0.0);
    const double mean = total / static_cast<double>(record.recovery_durations.size());
    if (mean > 0.0) {
      est.e = 1.0 / mean;
    } else {
      est.e = kNan;
      est.division_by_zero.push_back("e");
    }
  }

  flag_if_out_of_range(est, "a", est.a);
  flag_if_out_of_range(est, "b", est.b);
  flag_if_out_of_range(est, "c", est.c);
  flag_if_out_of_range(est, "d", est.d);
  flag_if_out_of_range(est, "e", est.e);
  return est;
}

TrafficRecord aggregate_records(std::span<const TrafficRecord> records) {
  if (records.empty()) throw ValidationError("aggregate_records: empty input");
  std::vector<const TrafficRecord*> ordered;
  ordered.reserve(records.size());
  for (const auto& r : records) {
    if (r.node_id != records.front().node_id)
      throw ValidationError("aggregate_records: mixed node ids");
    ordered.push_back(&r);
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const TrafficRecord* x, const TrafficRecord* y) {
    return x->interval_index < y->interval_index;
  });
  TrafficRecord out;
  out.node_id = records.front().node_id;
  for (const TrafficRecord* r : ordered) {
    out.interval_index = r->interval_index;
    out.pkts_forwarded += r->pkts_forwarded;
    out.pkts_received += r->pkts_received;
    out.recovery_durations.insert(out.recovery_durations.end(), r->recovery_durations.begin(),
                                  r->recovery_durations.end());
  }
  // Final energy snapshot before applying the lifetime formula.
  const TrafficRecord* last = ordered.back();
  out.remaining_power = last->remaining_power;
  out.power_consumption_rate = last->power_consumption_rate;
  out.initial_energy = last->initial_energy;
  return out;
}

FeasibleProjection project_feasible(double a, double b, double c, double d, double e, double eta) {
  constexpr double kEps = 1e-9;
  FeasibleProjection proj;

  struct Param {
    const char* name;
    double* value;
  };
  double va = a, vb = b, vc = c, vd = d, ve = e;
  for (Param p : {Param{"a", &va}, Param{"b", &vb}, Param{"c", &vc}, Param{"d", &vd}, Param{"e", &ve}}) {
    const double clamped = std::clamp(*p.value, 0.0, 1.0);
    if (clamped != *p.value) {
      proj.adjustments.push_back({std::string(p.name) + "_clamped", *p.value, clamped});
      *p.value = clamped;
    }
  }

  auto scale_row = [&](const char* row_name, double* first) {
    const double sum = *first + vc + vd;
    if (sum <= 1.0) return;
    const double factor = (1.0 - kEps) / sum;
    proj.adjustments.push_back({std::string("row_") + row_name + "_scaled", sum, sum * factor});
    *first *= factor;
    vc *= factor;
    vd *= factor;
  };

  // Scale the worse-violating row first; rescaling shrinks c and d, so the
  // other row is re-checked afterwards.
  if (va + vc + vd >= vb + vc + vd) {
    scale_row("W", &va);
    scale_row("D", &vb);
  } else {
    scale_row("D", &vb);
    scale_row("W", &va);
  }

  proj.params = validate_params(va, vb, vc, vd, ve, eta);
  return proj;
}

}  // namespace ncbm
