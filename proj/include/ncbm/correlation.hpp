#pragma once

#include <span>
#include <vector>

#include "ncbm/behavior.hpp"
#include "ncbm/smp.hpp"

namespace ncbm {

// Where to renormalize while folding members into a cluster. PerStep is the
// canonical mode; Deferred multiplies all members first and normalizes once.
// The two coincide up to rounding because row normalization is scale
// invariant, but they report degenerate rows at different fold positions and
// Deferred can underflow for many members with small entries.
enum class FoldNormalization { PerStep, Deferred };

// m correlated nodes collapsed to one chain over {S0,S1,S2,S3}.
struct CorrelatedCluster {
  std::vector<BehaviorParams> member_params;
  Mat4 cluster_tpm{};
  SojournSpec cluster_sojourn;
};

// Conditional-probability correlation measures of the cluster.
struct CorrelatedFunctions {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  double x = 0.0;
};

// Entrywise product of the two matrices, each row renormalized to sum 1.
// Throws DegenerateRowError when a raw row sums to zero.
Mat4 compose_pair(const Mat4& p1, const Mat4& p2);
inline Mat4 compose_pair(const EmbeddedTpm& p1, const EmbeddedTpm& p2) {
  return compose_pair(p1.p, p2.p);
}

// Left fold of compose_pair over the members in list order; m = 1 returns the
// member's TPM bit-exactly. Cluster sojourn means are the arithmetic means of
// the member means per transition; all members must share one family.
CorrelatedCluster compose_cluster(std::span<const BehaviorParams> members,
                                  std::span<const SojournSpec> member_sojourns,
                                  FoldNormalization normalization = FoldNormalization::PerStep);

// Every member shares one sojourn spec (defaults to unit exponential means).
CorrelatedCluster compose_cluster(std::span<const BehaviorParams> members,
                                  const SojournSpec& shared_sojourn = SojournSpec::uniform(1.0),
                                  FoldNormalization normalization = FoldNormalization::PerStep);

// Correlated functions u, v, w, x evaluated from the cluster's stationary
// vector and the aggregate member products A = prod a_i, B = prod b_i, ...:
//   u = A^2/pi0 * pi1
//   v = B^2/pi1 * pi0 + E^2/pi3 * pi0
//   w = C^2/pi0 * pi2 + C^2/pi1 * pi2
//   x = D^2/pi0 * pi3 + D^2/pi1 * pi3 + D^2/pi2 * pi3
// where each denominator pi_k is computed as 1 - (sum of the other three).
// A term with a zero numerator contributes 0 without touching its
// denominator; otherwise a vanishing denominator (<= 1e-14) is an error.

// Per-function evaluation: a function whose denominator vanished is nullopt,
// with a message naming the term in `errors`. The other functions still
// evaluate (chains with absorbing states routinely zero out some pi_k).
struct CorrelatedFunctionsReport {
  std::optional<double> u, v, w, x;
  std::vector<std::string> errors;
};

CorrelatedFunctionsReport correlated_functions_report(const CorrelatedCluster& cluster);

// All four at once; throws ZeroDenominatorError naming the first failed term.
CorrelatedFunctions correlated_functions(const CorrelatedCluster& cluster);

}  // namespace ncbm
