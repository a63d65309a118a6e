#include "ncbm/smp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace ncbm {

namespace {

constexpr double kResidualTol = 1e-10;

double residual(const Vec4& pi, const Mat4& p) { return linf_diff(vec_mat(pi, p), pi); }

// Stationary vector of the chain restricted to the closed class `states`
// (pi P = pi with one balance row replaced by the normalization).
bool solve_closed_class(const Mat4& p, const std::vector<int>& states, Vec4& pi_out) {
  const int n = static_cast<int>(states.size());
  pi_out = Vec4{};
  if (n == 1) {
    pi_out[states[0]] = 1.0;
    return true;
  }
  Mat4 a{};
  Vec4 b{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = p[states[j]][states[i]];  // transpose of restriction
  for (int i = 0; i < n; ++i) a[i][i] -= 1.0;
  for (int j = 0; j < n; ++j) a[0][j] = 1.0;  // replace first balance row
  b[0] = 1.0;
  Vec4 x{};
  if (!solve_linear(n, a, b, x)) return false;
  for (int i = 0; i < n; ++i) {
    if (x[i] < -1e-9) return false;
    pi_out[states[i]] = std::max(0.0, x[i]);
  }
  double s = vec_sum(pi_out);
  if (!(s > 0.0) || !std::isfinite(s)) return false;
  for (auto& v : pi_out) v /= s;
  return true;
}

// Lazy-chain power iteration from the given start indicator. The lazy matrix
// (P+I)/2 shares P's stationary vectors and absorption probabilities but is
// aperiodic, so the iteration always converges on a 4-state chain.
bool power_iteration_from(const Mat4& p, int start, Vec4& pi_out) {
  Mat4 lazy{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) lazy[i][j] = 0.5 * p[i][j];
    lazy[i][i] += 0.5;
  }
  Vec4 x{};
  x[start] = 1.0;
  constexpr long kMaxIters = 50'000'000;
  for (long it = 0; it < kMaxIters; ++it) {
    Vec4 next = vec_mat(x, lazy);
    const double delta = linf_diff(next, x);
    x = next;
    if (delta < 1e-14) {
      pi_out = x;
      return true;
    }
  }
  return false;
}

}  // namespace

Vec4 stationary(const Mat4& p) {
  // Reachability over the nonzero pattern (structural zeros are exact 0.0).
  bool reach[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) reach[i][j] = (i == j) || p[i][j] > 0.0;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);

  constexpr int kStart = 0;  // W / S0

  // Communicating class of each state, restricted to states reachable from W.
  int class_id[4];
  for (int i = 0; i < 4; ++i) class_id[i] = -1;
  int n_classes = 0;
  for (int i = 0; i < 4; ++i) {
    if (!reach[kStart][i] || class_id[i] >= 0) continue;
    for (int j = i; j < 4; ++j)
      if (reach[kStart][j] && reach[i][j] && reach[j][i]) class_id[j] = n_classes;
    ++n_classes;
  }

  // A class is closed when no member has positive mass leaving the class.
  std::vector<bool> closed(n_classes, true);
  for (int i = 0; i < 4; ++i) {
    if (class_id[i] < 0) continue;
    for (int j = 0; j < 4; ++j)
      if (p[i][j] > 0.0 && class_id[j] != class_id[i]) closed[class_id[i]] = false;
  }

  Vec4 pi{};
  bool solved = true;

  if (closed[class_id[kStart]]) {
    std::vector<int> states;
    for (int i = 0; i < 4; ++i)
      if (class_id[i] == class_id[kStart]) states.push_back(i);
    solved = solve_closed_class(p, states, pi);
  } else {
    // Transient start: pi = sum over closed classes of
    // P(absorb into class | start) * (class stationary vector).
    std::vector<int> transient;
    for (int i = 0; i < 4; ++i)
      if (class_id[i] >= 0 && !closed[class_id[i]]) transient.push_back(i);
    const int nt = static_cast<int>(transient.size());
    int start_pos = 0;
    for (int i = 0; i < nt; ++i)
      if (transient[i] == kStart) start_pos = i;

    Mat4 i_minus_q{};
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < nt; ++j)
        i_minus_q[i][j] = (i == j ? 1.0 : 0.0) - p[transient[i]][transient[j]];

    double weight_sum = 0.0;
    std::vector<Vec4> class_pis(n_classes);
    std::vector<double> weights(n_classes, 0.0);
    for (int c = 0; c < n_classes && solved; ++c) {
      if (!closed[c]) continue;
      std::vector<int> states;
      for (int i = 0; i < 4; ++i)
        if (class_id[i] == c) states.push_back(i);
      Vec4 r{};
      for (int i = 0; i < nt; ++i) {
        double mass = 0.0;
        for (int s : states) mass += p[transient[i]][s];
        r[i] = mass;
      }
      Vec4 h{};
      if (!solve_linear(nt, i_minus_q, r, h)) {
        solved = false;
        break;
      }
      weights[c] = std::clamp(h[start_pos], 0.0, 1.0);
      weight_sum += weights[c];
      solved = solve_closed_class(p, states, class_pis[c]);
    }
    if (solved && weight_sum > 0.0) {
      for (int c = 0; c < n_classes; ++c)
        if (closed[c])
          for (int i = 0; i < 4; ++i) pi[i] += (weights[c] / weight_sum) * class_pis[c][i];
    } else {
      solved = false;
    }
  }

  if (solved && residual(pi, p) <= kResidualTol) return pi;

  // Fallback: lazy power iteration from the start indicator.
  Vec4 pi_pow{};
  if (power_iteration_from(p, kStart, pi_pow) && residual(pi_pow, p) <= kResidualTol) return pi_pow;

  std::ostringstream msg;
  msg << "NumericalFailure: stationary solve and power-iteration fallback both missed residual "
      << kResidualTol;
  throw NumericalError(msg.str());
}

SojournSpec SojournSpec::uniform(double mean_value, SojournFamily family) {
  SojournSpec s;
  s.family = family;
  for (auto& row : s.mean) row.fill(mean_value);
  return s;
}

SojournSpec SojournSpec::per_state(const Vec4& state_means, SojournFamily family) {
  SojournSpec s;
  s.family = family;
  for (int i = 0; i < 4; ++i) s.mean[i].fill(state_means[i]);
  return s;
}

void check_sojourn(const Mat4& tpm, const SojournSpec& sojourn) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (tpm[i][j] > 0.0 && !(std::isfinite(sojourn.mean[i][j]) && sojourn.mean[i][j] > 0.0)) {
        std::ostringstream msg;
        msg << "sojourn mean E[T_" << i << j << "] = " << sojourn.mean[i][j]
            << " must be positive and finite where the TPM entry is nonzero";
        throw ValidationError(msg.str());
      }
    }
}

SteadyState limiting_distribution(const Mat4& tpm, const SojournSpec& sojourn) {
  check_sojourn(tpm, sojourn);
  SteadyState out;
  out.pi = stationary(tpm);
  for (int i = 0; i < 4; ++i) {
    double mean_i = 0.0;
    for (int j = 0; j < 4; ++j)
      if (tpm[i][j] > 0.0) mean_i += tpm[i][j] * sojourn.mean[i][j];
    out.mean_sojourn[i] = mean_i;
  }
  double denom = 0.0;
  for (int i = 0; i < 4; ++i) denom += out.pi[i] * out.mean_sojourn[i];
  for (int i = 0; i < 4; ++i) out.limiting[i] = out.pi[i] * out.mean_sojourn[i] / denom;
  return out;
}

SteadyState limiting_distribution(const EmbeddedTpm& tpm, const SojournSpec& sojourn) {
  return limiting_distribution(tpm.p, sojourn);
}

Vec4 transient_occupancy(const Mat4& tpm, int initial, std::uint64_t steps) {
  const Mat4 pn = mat_pow(tpm, steps);
  return pn[initial];
}

namespace {

// splitmix64-style mixer; gives trajectory k its own generator stream.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform draw in the open interval (0,1); 52 explicit mantissa bits.
double uniform_open(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 12) + 0.5) * 0x1.0p-52;
}

int sample_row(const Vec4& row, double u) {
  double cum = 0.0;
  int last_positive = -1;
  for (int j = 0; j < 4; ++j) {
    if (row[j] <= 0.0) continue;
    cum += row[j];
    last_positive = j;
    if (u < cum) return j;
  }
  return last_positive;  // u beyond accumulated mass (rounding): clamp
}

Trajectory sample_trajectory(const Mat4& p, const SojournSpec& sojourn, int initial, double horizon,
                             std::uint64_t stream_seed) {
  std::mt19937_64 eng(stream_seed);
  Trajectory traj;
  traj.horizon = horizon;
  traj.entries.push_back({BehaviorState(initial), 0.0});
  int state = initial;
  double t = 0.0;
  for (;;) {
    if (p[state][state] == 1.0) break;  // absorbing
    const int next = sample_row(p[state], uniform_open(eng));
    const double mean = sojourn.mean[state][next];
    const double hold = sojourn.family == SojournFamily::Deterministic
                            ? mean
                            : -mean * std::log(uniform_open(eng));
    t += hold;
    if (t > horizon) break;
    traj.entries.push_back({BehaviorState(next), t});
    state = next;
  }
  return traj;
}

}  // namespace

Trajectory simulate(const EmbeddedTpm& tpm, const SojournSpec& sojourn, BehaviorState initial,
                    double horizon, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw ValidationError("simulate: horizon must be positive");
  check_sojourn(tpm.p, sojourn);
  return sample_trajectory(tpm.p, sojourn, index_of(initial), horizon, mix_seed(seed, 0));
}

std::vector<Trajectory> simulate_many(const EmbeddedTpm& tpm, const SojournSpec& sojourn,
                                      BehaviorState initial, double horizon, int count,
                                      std::uint64_t seed, int threads) {
  if (count < 1) throw ValidationError("simulate_many: count must be >= 1");
  if (!(horizon > 0.0)) throw ValidationError("simulate_many: horizon must be positive");
  check_sojourn(tpm.p, sojourn);
  std::vector<Trajectory> out(static_cast<std::size_t>(count));
  const int workers = std::max(1, std::min(threads, count));
  std::atomic<int> next_index{0};
  auto worker = [&]() {
    for (;;) {
      const int k = next_index.fetch_add(1);
      if (k >= count) return;
      out[static_cast<std::size_t>(k)] = sample_trajectory(
          tpm.p, sojourn, index_of(initial), horizon, mix_seed(seed, static_cast<std::uint64_t>(k)));
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

OccupancyStats occupancy_estimate(std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) throw ValidationError("EmptyInput: occupancy_estimate needs >= 1 trajectory");
  const double horizon = trajectories.front().horizon;
  for (const auto& traj : trajectories)
    if (traj.horizon != horizon)
      throw ValidationError("occupancy_estimate: trajectories must share one horizon");

  // Welford accumulation of per-trajectory occupancy fractions.
  Vec4 mean{};
  Vec4 m2{};
  std::int64_t n = 0;
  for (const auto& traj : trajectories) {
    Vec4 time_in{};
    const auto& e = traj.entries;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double until = (i + 1 < e.size()) ? e[i + 1].entry_time : horizon;
      time_in[index_of(e[i].state)] += until - e[i].entry_time;
    }
    ++n;
    for (int s = 0; s < 4; ++s) {
      const double frac = time_in[s] / horizon;
      const double delta = frac - mean[s];
      mean[s] += delta / static_cast<double>(n);
      m2[s] += delta * (frac - mean[s]);
    }
  }
  OccupancyStats stats;
  stats.occupancy = mean;
  if (n > 1) {
    for (int s = 0; s < 4; ++s)
      stats.std_error[s] = std::sqrt(m2[s] / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  return stats;
}

}  // namespace ncbm
