#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ncbm/correlation.hpp"
#include "oracles.hpp"

using namespace ncbm;

namespace {

BehaviorParams params(double a, double b, double c, double d, double e) {
  return validate_params(a, b, c, d, e, 10.0);
}

}  // namespace

TEST_SUITE("correlation") {
  TEST_CASE("compose_pair of identical members matches the product-then-normalize oracle") {
    const EmbeddedTpm tpm = build_tpm(params(0.1, 0.2, 0.05, 0.05, 0.3));
    const Mat4 cluster = compose_pair(tpm, tpm);
    const Mat4 expected = oracles::one_shot_compose({tpm.p, tpm.p});
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(std::fabs(cluster[i][j] - expected[i][j]) <= 1e-15);
    // Row S0 raw = [0.64, 0.01, 0.0025, 0.0025], sum 0.655.
    CHECK(cluster[0][0] == doctest::Approx(0.977099).epsilon(1e-5));
    CHECK(cluster[0][1] == doctest::Approx(0.015267).epsilon(1e-4));
    CHECK(cluster[0][2] == doctest::Approx(0.003817).epsilon(1e-4));
    CHECK(cluster[0][3] == doctest::Approx(0.003817).epsilon(1e-4));
  }

  TEST_CASE("composing e=1 with e=0 degenerates row S3") {
    const EmbeddedTpm recovered = build_tpm(params(0.1, 0.2, 0.05, 0.05, 1.0));
    const EmbeddedTpm failed = build_tpm(params(0.1, 0.2, 0.05, 0.05, 0.0));
    try {
      compose_pair(recovered, failed);
      FAIL("expected DegenerateRowError");
    } catch (const DegenerateRowError& err) {
      CHECK(err.row() == 3);
      CHECK(std::string(err.what()).find("S3") != std::string::npos);
    }
  }

  TEST_CASE("composing with an all-cooperative member reduces rows or degenerates") {
    // Second node a=c=d=0, e=1: row products zero out the off-diagonal mass.
    const EmbeddedTpm p = build_tpm(params(0.1, 0.2, 0.05, 0.05, 0.3));
    const EmbeddedTpm ident = build_tpm(params(0.0, 0.2, 0.0, 0.0, 1.0));
    const Mat4 cluster = compose_pair(p, ident);
    CHECK(oracles::linf(cluster[0], Vec4{1.0, 0.0, 0.0, 0.0}) <= 1e-15);  // S0 collapses to W
    // Same member against a never-recovering partner kills row S3 entirely.
    const EmbeddedTpm stuck = build_tpm(params(0.1, 0.2, 0.05, 0.05, 0.0));
    CHECK_THROWS_AS(compose_pair(stuck, ident), DegenerateRowError);
  }

  TEST_CASE("absorbing composes to absorbing") {
    const EmbeddedTpm absorbing = build_tpm(params(0.0, 0.2, 0.0, 0.0, 0.3));
    const Mat4 cluster = compose_pair(absorbing, absorbing);
    CHECK(cluster[0] == Vec4{1.0, 0.0, 0.0, 0.0});
  }

  TEST_CASE("compose_cluster with one member returns its TPM bit-exactly") {
    const BehaviorParams member = params(0.17, 0.23, 0.04, 0.06, 0.5);
    const CorrelatedCluster cluster = compose_cluster(std::vector<BehaviorParams>{member});
    const EmbeddedTpm tpm = build_tpm(member);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(cluster.cluster_tpm[i][j] == tpm.p[i][j]);
  }

  TEST_CASE("two identical members equal compose_pair") {
    const BehaviorParams member = params(0.1, 0.2, 0.05, 0.05, 0.3);
    const CorrelatedCluster cluster =
        compose_cluster(std::vector<BehaviorParams>{member, member});
    const EmbeddedTpm tpm = build_tpm(member);
    const Mat4 pair = compose_pair(tpm, tpm);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(cluster.cluster_tpm[i][j] == pair[i][j]);
  }

  TEST_CASE("per-step and deferred normalization agree with the one-shot oracle") {
    // Row normalization is scale invariant, so the fold with per-step
    // renormalization and the single deferred normalization coincide up to
    // rounding; both modes stay exposed because they report degenerate rows
    // at different fold positions.
    const BehaviorParams member = params(0.1, 0.2, 0.05, 0.05, 0.3);
    const std::vector<BehaviorParams> members(4, member);
    const Mat4 per_step = compose_cluster(members).cluster_tpm;
    const Mat4 deferred =
        compose_cluster(members, SojournSpec::uniform(1.0), FoldNormalization::Deferred)
            .cluster_tpm;
    const EmbeddedTpm tpm = build_tpm(member);
    const Mat4 oracle = oracles::one_shot_compose({tpm.p, tpm.p, tpm.p, tpm.p});
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        CHECK(std::fabs(deferred[i][j] - oracle[i][j]) <= 1e-12);
        CHECK(std::fabs(per_step[i][j] - oracle[i][j]) <= 1e-12);
      }
  }

  TEST_CASE("fold position is reported when a later member degenerates a row") {
    const std::vector<BehaviorParams> members{params(0.1, 0.2, 0.05, 0.05, 1.0),
                                              params(0.1, 0.2, 0.05, 0.05, 0.5),
                                              params(0.1, 0.2, 0.05, 0.05, 0.0)};
    try {
      compose_cluster(members);
      FAIL("expected DegenerateRowError");
    } catch (const DegenerateRowError& err) {
      CHECK(err.row() == 3);
      CHECK(err.fold_position() == 2);
    }
  }

  TEST_CASE("cluster rows are stochastic and keep the structural zeros") {
    oracles::ParamGen gen(808);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<BehaviorParams> members;
      const int m = 2 + trial % 4;  // 2..5
      for (int k = 0; k < m; ++k) members.push_back(gen.strict_interior());
      const CorrelatedCluster cluster = compose_cluster(members);
      for (int i = 0; i < 4; ++i) {
        CHECK(std::fabs(vec_sum(cluster.cluster_tpm[i]) - 1.0) <= 1e-12);
        for (int j = 0; j < 4; ++j) CHECK(cluster.cluster_tpm[i][j] >= 0.0);
      }
      CHECK(cluster.cluster_tpm[2][0] == 0.0);
      CHECK(cluster.cluster_tpm[2][1] == 0.0);
      CHECK(cluster.cluster_tpm[3][1] == 0.0);
      CHECK(cluster.cluster_tpm[3][2] == 0.0);
    }
  }

  TEST_CASE("S0 diagonal concentration is non-decreasing in m when W dominates the row") {
    oracles::ParamGen gen(909);
    for (int trial = 0; trial < 50; ++trial) {
      BehaviorParams member = gen.strict_interior();
      // Condition for the property: the raw diagonal is the row maximum.
      while (1.0 - (member.a + member.c + member.d) <
             std::max({member.a, member.c, member.d}))
        member = gen.strict_interior();
      double prev = 0.0;
      for (int m = 1; m <= 6; ++m) {
        const std::vector<BehaviorParams> members(static_cast<std::size_t>(m), member);
        const double diag = compose_cluster(members).cluster_tpm[0][0];
        CHECK(diag >= prev - 1e-15);
        prev = diag;
      }
    }
  }

  TEST_CASE("correlated functions are invariant under member permutation") {
    const std::vector<BehaviorParams> members{params(0.1, 0.2, 0.05, 0.05, 0.3),
                                              params(0.2, 0.4, 0.02, 0.08, 0.6),
                                              params(0.05, 0.3, 0.1, 0.02, 0.4)};
    std::vector<BehaviorParams> reversed(members.rbegin(), members.rend());
    const CorrelatedFunctions f1 = correlated_functions(compose_cluster(members));
    const CorrelatedFunctions f2 = correlated_functions(compose_cluster(reversed));
    CHECK(f1.u == doctest::Approx(f2.u).epsilon(1e-12));
    CHECK(f1.v == doctest::Approx(f2.v).epsilon(1e-12));
    CHECK(f1.w == doctest::Approx(f2.w).epsilon(1e-12));
    CHECK(f1.x == doctest::Approx(f2.x).epsilon(1e-12));
  }

  TEST_CASE("cluster sojourn means are the arithmetic member means") {
    const std::vector<BehaviorParams> members{params(0.1, 0.2, 0.0, 0.0, 0.0),
                                              params(0.2, 0.3, 0.0, 0.0, 0.0)};
    const std::vector<SojournSpec> sojourns{SojournSpec::uniform(2.0), SojournSpec::uniform(4.0)};
    const CorrelatedCluster cluster = compose_cluster(members, sojourns);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(cluster.cluster_sojourn.mean[i][j] == 3.0);
    CHECK_THROWS_AS(
        compose_cluster(members,
                        std::vector<SojournSpec>{
                            SojournSpec::uniform(1.0),
                            SojournSpec::uniform(1.0, SojournFamily::Deterministic)}),
        ValidationError);
  }

  TEST_CASE("u vanishes for any cluster whose members all have a = 0") {
    oracles::ParamGen gen(1212);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<BehaviorParams> members;
      for (int k = 0; k < 2 + trial % 3; ++k) {
        BehaviorParams p = gen.strict_interior();
        p.a = 0.0;
        members.push_back(p);
      }
      const CorrelatedFunctionsReport report =
          correlated_functions_report(compose_cluster(members));
      REQUIRE(report.u.has_value());
      CHECK(*report.u == 0.0);
    }
  }

  TEST_CASE("the report evaluates surviving functions alongside failed ones") {
    // a = 0 makes S1 unreachable, so v's first term denominator pi_1 is 0
    // while u short-circuits to 0 and stays available.
    const std::vector<BehaviorParams> members(3, params(0.0, 0.3, 0.1, 0.1, 0.5));
    const CorrelatedFunctionsReport report =
        correlated_functions_report(compose_cluster(members));
    CHECK(report.u == 0.0);
    CHECK_FALSE(report.v.has_value());
    CHECK_FALSE(report.errors.empty());
    CHECK_THROWS_AS(correlated_functions(compose_cluster(members)), ZeroDenominatorError);
  }

  TEST_CASE("two-state reduction matches the hand-derived substitution") {
    // Identical members a=0.2, b=0.3, c=d=e=0. Cluster rows:
    //   S0 = [0.64, 0.04, 0, 0] -> [16/17, 1/17, 0, 0]
    //   S1 = [0.09, 0.49, 0, 0] -> [9/58, 49/58, 0, 0]
    // pi0 = (9/58)/(1/17 + 9/58) = 153/211, pi1 = 58/211.
    //   u = (0.2*0.2)^2 / pi0 * pi1 = 0.0016 * 58 / 153
    //   v = (0.3*0.3)^2 / pi1 * pi0 = 0.0081 * 153 / 58   (e-term numerator is 0)
    //   w = x = 0 (c = d = 0)
    const std::vector<BehaviorParams> members(2, params(0.2, 0.3, 0.0, 0.0, 0.0));
    const CorrelatedCluster cluster = compose_cluster(members);
    const CorrelatedFunctions f = correlated_functions(cluster);
    const double pi0 = 153.0 / 211.0;
    const double pi1 = 58.0 / 211.0;
    CHECK(std::fabs(f.u - 0.0016 / pi0 * pi1) <= 1e-10);
    CHECK(std::fabs(f.v - 0.0081 / pi1 * pi0) <= 1e-10);
    CHECK(f.w == 0.0);
    CHECK(f.x == 0.0);
  }

  TEST_CASE("single member functions follow the same substitution") {
    const std::vector<BehaviorParams> members{params(0.2, 0.3, 0.0, 0.0, 0.0)};
    const CorrelatedFunctions f = correlated_functions(compose_cluster(members));
    const double pi0 = 0.6, pi1 = 0.4;
    CHECK(std::fabs(f.u - 0.2 * 0.2 / pi0 * pi1) <= 1e-10);
    CHECK(std::fabs(f.v - 0.3 * 0.3 / pi1 * pi0) <= 1e-10);
  }

  TEST_CASE("vanishing pi0 with live mass into S1 raises ZeroDenominator") {
    // b = 0 makes S1 absorbing while a > 0 still feeds it: pi = (0,1,0,0).
    const std::vector<BehaviorParams> members(2, params(0.5, 0.0, 0.0, 0.0, 0.0));
    CHECK_THROWS_WITH_AS(correlated_functions(compose_cluster(members)),
                         doctest::Contains("pi_1"), ZeroDenominatorError);
  }

  TEST_CASE("compose_cluster rejects empty member lists") {
    CHECK_THROWS_AS(compose_cluster(std::vector<BehaviorParams>{}), ValidationError);
  }

  TEST_CASE("u,v,w,x match direct formula substitution on interior clusters") {
    // Independent route: the cluster chain's stationary vector from the
    // test-local lazy power iteration, plugged term by term into
    //   u = A^2/pi0*pi1, v = B^2/pi1*pi0 + E^2/pi3*pi0,
    //   w = C^2*pi2*(1/pi0 + 1/pi1), x = D^2*pi3*(1/pi0 + 1/pi1 + 1/pi2)
    // with A..E the plain member products.
    oracles::ParamGen gen(1414);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<BehaviorParams> members;
      for (int k = 0; k < 2 + trial % 2; ++k) members.push_back(gen.strict_interior());
      const CorrelatedCluster cluster = compose_cluster(members);
      const auto pi = oracles::lazy_power_iteration_from_w(cluster.cluster_tpm);
      REQUIRE(pi.has_value());
      const Vec4& s = *pi;
      if (s[0] < 1e-6 || s[1] < 1e-6 || s[2] < 1e-6 || s[3] < 1e-6) continue;
      double pa = 1.0, pb = 1.0, pc = 1.0, pd = 1.0, pe = 1.0;
      for (const auto& m : members) {
        pa *= m.a;
        pb *= m.b;
        pc *= m.c;
        pd *= m.d;
        pe *= m.e;
      }
      const CorrelatedFunctions f = correlated_functions(cluster);
      CHECK(f.u == doctest::Approx(pa * pa / s[0] * s[1]).epsilon(1e-6));
      CHECK(f.v == doctest::Approx(pb * pb / s[1] * s[0] + pe * pe / s[3] * s[0]).epsilon(1e-6));
      CHECK(f.w == doctest::Approx(pc * pc * s[2] * (1.0 / s[0] + 1.0 / s[1])).epsilon(1e-6));
      CHECK(f.x ==
            doctest::Approx(pd * pd * s[3] * (1.0 / s[0] + 1.0 / s[1] + 1.0 / s[2])).epsilon(1e-6));
    }
  }

  TEST_CASE("16-state two-node enumeration (reference only, never a runtime path)") {
    // Tracking two nodes exactly takes the full product space
    // {WW, WD, ..., LL} whose transition matrix is the Kronecker product of
    // the member TPMs; the state count grows as 4^m. The cluster chain is the
    // 4-state shortcut. The enumeration stays here as a reference: on the
    // joint chain of independent members, the probability that both still
    // forward after n steps factorizes into single-node W occupancies, which
    // is exactly the IndependenceProduct survivability reading.
    const EmbeddedTpm p1 = build_tpm(params(0.1, 0.2, 0.05, 0.05, 0.3));
    const EmbeddedTpm p2 = build_tpm(params(0.2, 0.4, 0.02, 0.08, 0.6));

    std::array<std::array<double, 16>, 16> joint{};
    for (int i1 = 0; i1 < 4; ++i1)
      for (int i2 = 0; i2 < 4; ++i2)
        for (int j1 = 0; j1 < 4; ++j1)
          for (int j2 = 0; j2 < 4; ++j2)
            joint[i1 * 4 + i2][j1 * 4 + j2] = p1.p[i1][j1] * p2.p[i2][j2];

    for (int i = 0; i < 16; ++i) {
      double sum = 0.0;
      for (int j = 0; j < 16; ++j) sum += joint[i][j];
      CHECK(std::fabs(sum - 1.0) <= 1e-12);
    }

    std::array<double, 16> x{};
    x[0] = 1.0;  // WW
    const int steps = 40;
    for (int s = 0; s < steps; ++s) {
      std::array<double, 16> next{};
      for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i) next[j] += x[i] * joint[i][j];
      x = next;
    }
    const double joint_ww = x[0];
    const double occ1 = transient_occupancy(p1, BehaviorState::Forward, steps)[0];
    const double occ2 = transient_occupancy(p2, BehaviorState::Forward, steps)[0];
    CHECK(std::fabs(joint_ww - occ1 * occ2) <= 1e-12);
  }
}
