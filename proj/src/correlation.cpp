#include "ncbm/correlation.hpp"

#include <cmath>
#include <sstream>

namespace ncbm {

namespace {

Mat4 normalize_rows(const Mat4& raw, int fold_position) {
  Mat4 out{};
  for (int i = 0; i < 4; ++i) {
    const double sum = vec_sum(raw[i]);
    if (sum == 0.0) {
      std::ostringstream msg;
      msg << "DegenerateRow: cluster row " << kClusterStateNames[i]
          << " has zero total mass after combining member " << fold_position + 1;
      throw DegenerateRowError(i, fold_position, msg.str());
    }
    for (int j = 0; j < 4; ++j) out[i][j] = raw[i][j] / sum;
  }
  return out;
}

Mat4 entrywise(const Mat4& p1, const Mat4& p2) {
  Mat4 q{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) q[i][j] = p1[i][j] * p2[i][j];
  return q;
}

}  // namespace

Mat4 compose_pair(const Mat4& p1, const Mat4& p2) {
  return normalize_rows(entrywise(p1, p2), 1);
}

CorrelatedCluster compose_cluster(std::span<const BehaviorParams> members,
                                  std::span<const SojournSpec> member_sojourns,
                                  FoldNormalization normalization) {
  if (members.empty()) throw ValidationError("compose_cluster: need at least one member");
  if (member_sojourns.size() != members.size())
    throw ValidationError("compose_cluster: one sojourn spec per member required");
  for (std::size_t k = 1; k < member_sojourns.size(); ++k)
    if (member_sojourns[k].family != member_sojourns[0].family)
      throw ValidationError("compose_cluster: members must share one sojourn family");

  CorrelatedCluster cluster;
  cluster.member_params.assign(members.begin(), members.end());

  Mat4 tpm = build_tpm(validate_params(members[0])).p;
  if (normalization == FoldNormalization::PerStep) {
    for (std::size_t k = 1; k < members.size(); ++k) {
      const Mat4 next = build_tpm(validate_params(members[k])).p;
      tpm = normalize_rows(entrywise(tpm, next), static_cast<int>(k));
    }
  } else {
    Mat4 raw = tpm;
    for (std::size_t k = 1; k < members.size(); ++k)
      raw = entrywise(raw, build_tpm(validate_params(members[k])).p);
    if (members.size() > 1) tpm = normalize_rows(raw, static_cast<int>(members.size()) - 1);
  }
  cluster.cluster_tpm = tpm;

  cluster.cluster_sojourn.family = member_sojourns[0].family;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double sum = 0.0;
      for (const auto& s : member_sojourns) sum += s.mean[i][j];
      cluster.cluster_sojourn.mean[i][j] = sum / static_cast<double>(member_sojourns.size());
    }
  return cluster;
}

CorrelatedCluster compose_cluster(std::span<const BehaviorParams> members,
                                  const SojournSpec& shared_sojourn,
                                  FoldNormalization normalization) {
  std::vector<SojournSpec> sojourns(members.size(), shared_sojourn);
  return compose_cluster(members, sojourns, normalization);
}

namespace {

struct TermError {
  std::string message;
};

// One additive term of Eq.-style u/v/w/x: squared_product/denominator * pi_factor.
// Zero numerator short-circuits to 0; otherwise the denominator must be positive.
double corr_term(const char* fn, const char* denom_name, double squared_product, double denominator,
                 double pi_factor) {
  if (squared_product == 0.0 || pi_factor == 0.0) return 0.0;
  if (denominator <= 1e-14) {
    std::ostringstream msg;
    msg << "ZeroDenominator: " << fn << " requires " << denom_name
        << " > 0 but the cluster stationary vector gives " << denominator;
    throw TermError{msg.str()};
  }
  return squared_product / denominator * pi_factor;
}

}  // namespace

CorrelatedFunctionsReport correlated_functions_report(const CorrelatedCluster& cluster) {
  // Aggregate raw product entries over the members (the unnormalized
  // S0->S1, S1->S0, S0->S2, ->S3, S3->S0 products).
  double pa = 1.0, pb = 1.0, pc = 1.0, pd = 1.0, pe = 1.0;
  for (const auto& m : cluster.member_params) {
    pa *= m.a;
    pb *= m.b;
    pc *= m.c;
    pd *= m.d;
    pe *= m.e;
  }
  const Vec4 pi = stationary(cluster.cluster_tpm);
  // Each denominator written as 1 - (sum of the other three components).
  const double d0 = 1.0 - (pi[1] + pi[2] + pi[3]);
  const double d1 = 1.0 - (pi[0] + pi[2] + pi[3]);
  const double d2 = 1.0 - (pi[0] + pi[1] + pi[3]);
  const double d3 = 1.0 - (pi[0] + pi[1] + pi[2]);

  CorrelatedFunctionsReport report;
  auto evaluate = [&report](std::optional<double>& slot, auto&& fn) {
    try {
      slot = fn();
    } catch (const TermError& err) {
      report.errors.push_back(err.message);
    }
  };
  evaluate(report.u, [&] { return corr_term("u", "1-(pi_1+pi_2+pi_3)", pa * pa, d0, pi[1]); });
  evaluate(report.v, [&] {
    return corr_term("v", "1-(pi_0+pi_2+pi_3)", pb * pb, d1, pi[0]) +
           corr_term("v", "1-(pi_0+pi_1+pi_2)", pe * pe, d3, pi[0]);
  });
  evaluate(report.w, [&] {
    return corr_term("w", "1-(pi_1+pi_2+pi_3)", pc * pc, d0, pi[2]) +
           corr_term("w", "1-(pi_0+pi_2+pi_3)", pc * pc, d1, pi[2]);
  });
  evaluate(report.x, [&] {
    return corr_term("x", "1-(pi_1+pi_2+pi_3)", pd * pd, d0, pi[3]) +
           corr_term("x", "1-(pi_0+pi_2+pi_3)", pd * pd, d1, pi[3]) +
           corr_term("x", "1-(pi_0+pi_1+pi_3)", pd * pd, d2, pi[3]);
  });
  return report;
}

CorrelatedFunctions correlated_functions(const CorrelatedCluster& cluster) {
  const CorrelatedFunctionsReport report = correlated_functions_report(cluster);
  if (!report.errors.empty()) throw ZeroDenominatorError(report.errors.front());
  return CorrelatedFunctions{*report.u, *report.v, *report.w, *report.x};
}

}  // namespace ncbm
