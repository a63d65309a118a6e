#pragma once

#include <optional>
#include <string_view>

#include "ncbm/errors.hpp"
#include "ncbm/mat4.hpp"

namespace ncbm {

// Observable node states: forward (W), drop (D), inject (I), loss (L).
// The index mapping W->0, D->1, I->2, L->3 addresses every matrix in the toolkit.
enum class BehaviorState : int { Forward = 0, Drop = 1, Inject = 2, Loss = 3 };

// Cluster states S0..S3 map one-to-one onto {W,D,I,L}: a cluster is in S0 when
// all members forward, S1 when all drop, and so on.
enum class ClusterState : int { S0 = 0, S1 = 1, S2 = 2, S3 = 3 };

inline constexpr std::array<const char*, 4> kStateNames{"W", "D", "I", "L"};
inline constexpr std::array<const char*, 4> kClusterStateNames{"S0", "S1", "S2", "S3"};

inline constexpr int index_of(BehaviorState s) { return static_cast<int>(s); }
inline constexpr int index_of(ClusterState s) { return static_cast<int>(s); }
inline constexpr ClusterState to_cluster(BehaviorState s) { return ClusterState(index_of(s)); }
inline constexpr BehaviorState to_behavior(ClusterState s) { return BehaviorState(index_of(s)); }
inline const char* name(BehaviorState s) { return kStateNames[index_of(s)]; }
inline const char* name(ClusterState s) { return kClusterStateNames[index_of(s)]; }

std::optional<BehaviorState> parse_state(std::string_view token);

// The five transition probabilities plus the selfish threshold eta.
//   a  drop due to selfishness        b  forward (altruistic)
//   c  inject (malicious)             d  loss (battery, range, malfunction)
//   e  recovery from the loss state   eta  selfish threshold, > 1
struct BehaviorParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
  double eta = 10.0;
};

// Validates ranges and the two row constraints (a+c+d <= 1, b+c+d <= 1).
// Rejects rather than clamps; throws ValidationError naming the offender.
BehaviorParams validate_params(double a, double b, double c, double d, double e, double eta);
inline BehaviorParams validate_params(const BehaviorParams& p) {
  return validate_params(p.a, p.b, p.c, p.d, p.e, p.eta);
}

// 4x4 row-stochastic embedded transition matrix over {W,D,I,L} with the
// structural zeros p[I][W] = p[I][D] = p[L][D] = p[L][I] = 0.
struct EmbeddedTpm {
  Mat4 p{};
  double at(BehaviorState from, BehaviorState to) const { return p[index_of(from)][index_of(to)]; }
};

// Single-node embedded TPM:
//   W: [1-(a+c+d), a, c, d]
//   D: [b, 1-(b+c+d), c, d]
//   I: [0, 0, 1-d, d]
//   L: [e, 0, 0, 1-e]
EmbeddedTpm build_tpm(const BehaviorParams& params);

// Thresholds for classifying observed behavior levels. The defaults are tool
// defaults, not values from any measurement campaign.
struct StatusThresholds {
  double drop = 0.3;
  double forward = 0.5;
  double inject = 0.3;
};

StatusThresholds validate_thresholds(double drop, double forward, double inject);

// Observed per-node levels fed to classification. d and e act as indicators:
// the loss clause requires d == 1 and the forward clause requires e == 1
// ("not currently failed").
struct ObservedLevels {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
};

// Clause order is L, I, D, W (failure dominates; failed nodes leave routing).
// Comparisons are strict, so boundary ties fall through; returns nullopt when
// no clause matches (reported by callers, never defaulted).
std::optional<BehaviorState> classify_status(const ObservedLevels& obs,
                                             const StatusThresholds& thresholds);

}  // namespace ncbm
