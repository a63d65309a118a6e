#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ncbm/behavior.hpp"
#include "ncbm/mat4.hpp"

namespace ncbm {

enum class SojournFamily { Exponential, Deterministic };

// Per-transition holding-time means E[T_ij], in time units. A mean must be
// positive and finite wherever the TPM entry is nonzero; one family applies
// to every transition of a spec.
struct SojournSpec {
  Mat4 mean{};
  SojournFamily family = SojournFamily::Exponential;

  static SojournSpec uniform(double mean_value, SojournFamily family = SojournFamily::Exponential);
  // State-level means: every transition out of state i shares state_means[i].
  static SojournSpec per_state(const Vec4& state_means,
                               SojournFamily family = SojournFamily::Exponential);
};

// Throws ValidationError if any mean at a nonzero transition is <= 0 or non-finite.
void check_sojourn(const Mat4& tpm, const SojournSpec& sojourn);

// Stationary vector of the embedded chain: pi P = pi, sum pi = 1, pi >= 0.
// For reducible chains (absorbing states) this returns the limit of the
// occupancy started from state W/S0, which is itself a stationary vector.
// Implemented by exact closed-class decomposition with dense solves; a lazy
// power iteration backs it up, and NumericalError is thrown only when both
// miss the 1e-10 residual.
Vec4 stationary(const Mat4& tpm);
inline Vec4 stationary(const EmbeddedTpm& tpm) { return stationary(tpm.p); }

struct SteadyState {
  Vec4 pi{};            // embedded-chain stationary vector
  Vec4 mean_sojourn{};  // E[T_i] = sum_j P_ij E[T_ij]
  Vec4 limiting{};      // P_i = pi_i E[T_i] / sum_j pi_j E[T_j]
};

SteadyState limiting_distribution(const EmbeddedTpm& tpm, const SojournSpec& sojourn);
SteadyState limiting_distribution(const Mat4& tpm, const SojournSpec& sojourn);

// Row vector e_initial P^steps, computed by binary matrix powering.
Vec4 transient_occupancy(const Mat4& tpm, int initial, std::uint64_t steps);
inline Vec4 transient_occupancy(const EmbeddedTpm& tpm, BehaviorState initial,
                                std::uint64_t steps) {
  return transient_occupancy(tpm.p, index_of(initial), steps);
}

// One sampled semi-Markov path: states at their entry times, truncated at the
// horizon. Entry times strictly increase and start at 0.
struct Trajectory {
  struct Entry {
    BehaviorState state;
    double entry_time;
  };
  std::vector<Entry> entries;
  double horizon = 0.0;
};

// Deterministic in (tpm, sojourn, initial, horizon, seed). Embedded jumps are
// drawn from the TPM rows; holding times from the sojourn family. A state with
// diagonal exactly 1 is absorbing and ends the path immediately.
Trajectory simulate(const EmbeddedTpm& tpm, const SojournSpec& sojourn, BehaviorState initial,
                    double horizon, std::uint64_t seed);

// count trajectories; trajectory k uses a stream derived from (seed, k), so
// the result is independent of the worker count. simulate(...) above is
// trajectory 0 of this family.
std::vector<Trajectory> simulate_many(const EmbeddedTpm& tpm, const SojournSpec& sojourn,
                                      BehaviorState initial, double horizon, int count,
                                      std::uint64_t seed, int threads = 1);

struct OccupancyStats {
  Vec4 occupancy{};  // mean fraction of time per state, across trajectories
  Vec4 std_error{};  // sample standard error per state (0 for a single trajectory)
};

// Time-average occupancy over trajectories sharing one horizon.
OccupancyStats occupancy_estimate(std::span<const Trajectory> trajectories);

}  // namespace ncbm
