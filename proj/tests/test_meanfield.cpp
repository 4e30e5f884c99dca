#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "coopnet/graph.hpp"
#include "coopnet/meanfield.hpp"
#include "coopnet/rng.hpp"
#include "coopnet/sbm_params.hpp"

using namespace coopnet;

namespace {

Graph complete(int n) {
  std::vector<Graph::Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) edges.push_back({u, v});
  }
  return Graph::from_edge_list(n, edges);
}

Graph ring(int n, int k) {
  std::vector<Graph::Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int off = 1; off <= k / 2; ++off) {
      edges.push_back({u, (u + off) % n});
    }
  }
  return Graph::from_edge_list(n, edges);
}

}  // namespace

TEST_CASE("mean-field remeeting time on the complete graph") {
  CHECK(tau_mf(degree_moments(complete(4))) == doctest::Approx(4.0));
  // any regular graph: mu2 = mu1^2, so tau_mf = n
  CHECK(tau_mf(degree_moments(ring(20, 4))) == doctest::Approx(20.0));
}

TEST_CASE("mean-field critical ratio reduces to the regular formula") {
  CHECK(critical_ratio_mf(degree_moments(complete(4))).value ==
        doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(critical_ratio_mf(degree_moments(ring(20, 4))).value ==
        doctest::Approx(6.0).epsilon(1e-12));
  CHECK(critical_ratio_mf(degree_moments(ring(10, 2))).value ==
        doctest::Approx(8.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("erdos-renyi closed form, frozen values") {
  const CriticalRatio r = critical_ratio_er(100, 0.3);
  CHECK(r.numerator == doctest::Approx(0.3 * 9704 - 2).epsilon(1e-12));
  CHECK(r.denominator == doctest::Approx(98 * 0.4).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(74.21428571428571).epsilon(1e-12));
  CHECK(r.reciprocal() == doctest::Approx(39.2 / 2909.2).epsilon(1e-12));
  CHECK(r.favors_cooperation());
}

TEST_CASE("erdos-renyi closed form pole and dense limit") {
  const CriticalRatio pole = critical_ratio_er(100, 0.5);
  CHECK(pole.pole);
  CHECK(pole.reciprocal() == 0.0);
  for (int n : {10, 50, 200}) {
    CHECK(critical_ratio_er(n, 1.0).value ==
          doctest::Approx(-(n - 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("sbm expected moments, hand-computed") {
  // n=100, m=2: any other node is a same-group neighbor candidate with
  // probability 1/2, so mu1 = 99 (p/2 + q/2) and the degree variance is
  // 99 (p(1-p)/2 + q(1-q)/2).
  const DegreeMoments m = sbm_moments(SbmParams{100, 2, 0.8, 0.1});
  const double mu1 = 99.0 * (0.5 * 0.8 + 0.5 * 0.1);
  const double var = 99.0 * (0.5 * 0.8 * 0.2 + 0.5 * 0.1 * 0.9);
  CHECK(m.n == 100);
  CHECK(m.mu1 == doctest::Approx(mu1).epsilon(1e-12));
  CHECK(m.mu2 == doctest::Approx(var + mu1 * mu1).epsilon(1e-12));
}

TEST_CASE("sbm closed form equals the moment route") {
  Rng rng(314);
  for (int round = 0; round < 100; ++round) {
    SbmParams params;
    params.n = 20 + rng.below_int(400);
    params.m = 1 + rng.below_int(6);
    params.p = rng.uniform01();
    params.q = rng.uniform01() * params.p;
    const CriticalRatio direct = critical_ratio_sbm(params);
    const CriticalRatio via = critical_ratio_mf(sbm_moments(params));
    CHECK(direct.pole == via.pole);
    if (!direct.pole) {
      CHECK(direct.value ==
            doctest::Approx(via.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("sbm with p = q collapses to erdos-renyi") {
  Rng rng(2718);
  for (int round = 0; round < 100; ++round) {
    const int n = 10 + rng.below_int(300);
    const int m = 1 + rng.below_int(5);
    const double p = rng.uniform01();
    const CriticalRatio sbm = critical_ratio_sbm(SbmParams{n, m, p, p});
    const CriticalRatio er = critical_ratio_er(n, p);
    CHECK(sbm.pole == er.pole);
    if (!sbm.pole) {
      CHECK(sbm.value == doctest::Approx(er.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("phase-transition probability, frozen expansion values") {
  const QHat two = q_hat(2, 0.8, 100);
  CHECK(two.expansion == doctest::Approx(0.2036).epsilon(1e-12));
  REQUIRE(two.exact_root.has_value());
  CHECK(*two.exact_root == doctest::Approx(0.2036).epsilon(2e-3));

  const QHat four = q_hat(4, 0.8, 100);
  CHECK(four.expansion == doctest::Approx(0.4008).epsilon(1e-12));
  REQUIRE(four.exact_root.has_value());
  CHECK(*four.exact_root == doctest::Approx(0.4008).epsilon(2e-3));
}

TEST_CASE("the exact root really zeroes the closed-form denominator") {
  for (int m : {2, 3, 4}) {
    const QHat qh = q_hat(m, 0.8, 100);
    REQUIRE(qh.exact_root.has_value());
    const CriticalRatio at_root =
        critical_ratio_sbm(SbmParams{100, m, 0.8, *qh.exact_root});
    CHECK(at_root.pole);
  }
}

TEST_CASE("expansion error decays like one over n squared") {
  // remaining error after the 1/n term: log-log slope at most -1.9
  const double e100 = std::fabs(*q_hat(2, 0.8, 100).exact_root -
                                q_hat(2, 0.8, 100).expansion);
  const double e800 = std::fabs(*q_hat(2, 0.8, 800).exact_root -
                                q_hat(2, 0.8, 800).expansion);
  REQUIRE(e800 > 0.0);
  const double slope = std::log(e800 / e100) / std::log(8.0);
  CHECK(slope <= -1.9);
}

TEST_CASE("sparse-interconnection limit, frozen values") {
  const CriticalRatio two = bstar_small_q(100, 2, 0.8);
  CHECK(two.value == doctest::Approx(7839.2 / 39.2).epsilon(1e-12));
  const CriticalRatio four = bstar_small_q(100, 4, 0.8);
  CHECK(four.value == doctest::Approx(7838.4 / 238.4).epsilon(1e-12));
}

TEST_CASE("sparse limit is continuous with the closed form at large n") {
  const CriticalRatio limit = bstar_small_q(10000, 2, 0.8);
  const CriticalRatio near =
      critical_ratio_sbm(SbmParams{10000, 2, 0.8, 1e-6});
  CHECK(near.value == doctest::Approx(limit.value).epsilon(1e-3));
}

TEST_CASE("mean-field structure coefficient matches the exact route") {
  // vertex-transitive case: sigma from b* equals the moment formula
  const CriticalRatio bstar = critical_ratio_mf(degree_moments(ring(20, 4)));
  CHECK(sigma_mf(degree_moments(ring(20, 4))) ==
        doctest::Approx(structure_coefficient(bstar)).epsilon(1e-12));
  CHECK(sigma_mf(degree_moments(ring(20, 4))) ==
        doctest::Approx(1.4).epsilon(1e-12));
  // mu1 = 1 on a single edge: outside the formula's validity
  CHECK_THROWS_AS(sigma_mf(degree_moments(Graph::from_edge_list(2, {{0, 1}}))),
                  std::range_error);
}

TEST_CASE("mean-field fixation probability on a vertex-transitive graph") {
  const DegreeMoments m = degree_moments(complete(4));
  CHECK(fixation_mf(m, 2.0, 1.0, 0.01) ==
        doctest::Approx(0.2458333333).epsilon(1e-10));
  CHECK(fixation_mf(m, -3.0, 1.0, 0.05) ==
        doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("mean-field report bundles the pieces consistently") {
  const DegreeMoments m = degree_moments(ring(20, 4));
  const MeanFieldReport report = mean_field_report(m, 2.0, 1.0, 0.01);
  CHECK(report.tau_mf == doctest::Approx(tau_mf(m)));
  CHECK(report.bstar_mf.value == doctest::Approx(6.0));
  CHECK(report.sigma_mf == doctest::Approx(1.4));
  CHECK(report.rho_mf == doctest::Approx(fixation_mf(m, 2.0, 1.0, 0.01)));

  const DegreeMoments sparse = degree_moments(Graph::from_edge_list(
      2, {{0, 1}}));
  CHECK(std::isnan(mean_field_report(sparse, 2.0, 1.0, 0.01).sigma_mf));
}
