#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "coopnet/critical_ratio.hpp"
#include "coopnet/game.hpp"
#include "coopnet/graph.hpp"
#include "coopnet/meeting_times.hpp"

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

Graph star(int leaves) {
  std::vector<Graph::Edge> edges;
  for (int v = 1; v <= leaves; ++v) edges.push_back({0, v});
  return Graph::from_edge_list(leaves + 1, edges);
}

CoalescenceSummary summary_of(const Graph& g) {
  return remeeting_times(g, meeting_times(g));
}

}  // namespace

TEST_CASE("complete-graph fixation probability, frozen value") {
  const Graph g = complete(4);
  const CoalescenceSummary cs = summary_of(g);
  CHECK(fixation_probability_exact(g, cs, 2.0, 1.0, 0.01) ==
        doctest::Approx(0.2458333333).epsilon(1e-9));
}

TEST_CASE("fixation equals 1/n exactly at the critical ratio") {
  const Graph k4 = complete(4);
  const CoalescenceSummary cs4 = summary_of(k4);
  for (double delta : {0.005, 0.01, 0.05}) {
    CHECK(fixation_probability_exact(k4, cs4, -3.0, 1.0, delta) ==
          doctest::Approx(0.25).epsilon(1e-12));
  }
  const Graph r20 = ring(20, 4);
  const CoalescenceSummary cs20 = summary_of(r20);
  const double bstar = critical_ratio_exact(r20, cs20).value;
  CHECK(fixation_probability_exact(r20, cs20, bstar, 1.0, 0.02) ==
        doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("fixation is neutral at delta zero and linear in delta") {
  const Graph g = ring(12, 2);
  const CoalescenceSummary cs = summary_of(g);
  CHECK(fixation_probability_exact(g, cs, 7.0, 1.0, 0.0) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  const double base = 1.0 / 12.0;
  const double d1 = fixation_probability_exact(g, cs, 2.0, 1.0, 0.01) - base;
  const double d2 = fixation_probability_exact(g, cs, 2.0, 1.0, 0.02) - base;
  CHECK(d2 == doctest::Approx(2.0 * d1).epsilon(1e-10));
}

TEST_CASE("benefit above the critical ratio helps, below hurts") {
  const Graph g = ring(20, 4);  // critical ratio 6
  const CoalescenceSummary cs = summary_of(g);
  CHECK(fixation_probability_exact(g, cs, 6.5, 1.0, 0.01) > 0.05);
  CHECK(fixation_probability_exact(g, cs, 5.5, 1.0, 0.01) < 0.05);
}

TEST_CASE("critical ratio pole handling and reciprocal convention") {
  const CriticalRatio finite = CriticalRatio::make(6.0, 2.0, 1e-9);
  CHECK_FALSE(finite.pole);
  CHECK(finite.value == 3.0);
  CHECK(finite.reciprocal() == doctest::Approx(1.0 / 3.0));

  const CriticalRatio pole = CriticalRatio::make(5.0, 1e-12, 1e-9);
  CHECK(pole.pole);
  CHECK(std::isinf(pole.value));
  CHECK(pole.reciprocal() == 0.0);
  CHECK_FALSE(pole.favors_cooperation());
}

TEST_CASE("favors_cooperation needs a positive denominator above one") {
  const Graph r20 = ring(20, 4);
  CHECK(critical_ratio_exact(r20, summary_of(r20)).favors_cooperation());
  const Graph k4 = complete(4);
  CHECK_FALSE(critical_ratio_exact(k4, summary_of(k4)).favors_cooperation());
}

TEST_CASE("structure coefficient values and failure modes") {
  const Graph k4 = complete(4);
  const CriticalRatio bk4 = critical_ratio_exact(k4, summary_of(k4));
  CHECK(structure_coefficient(bk4) == doctest::Approx(0.5).epsilon(1e-9));

  const Graph r20 = ring(20, 4);
  const CriticalRatio br20 = critical_ratio_exact(r20, summary_of(r20));
  CHECK(structure_coefficient(br20) == doctest::Approx(1.4).epsilon(1e-9));

  const Graph s8 = star(8);
  const CriticalRatio bs8 = critical_ratio_exact(s8, summary_of(s8));
  CHECK_THROWS_AS(structure_coefficient(bs8), std::range_error);
  CHECK_THROWS_AS(structure_coefficient(CriticalRatio::make(1.0, 1.0, 1e-9)),
                  std::range_error);
}

TEST_CASE("selection condition applies the structure coefficient") {
  // K4 with sigma = 1/2: (R-P) sigma = 1 is not above T-S = 5
  CHECK_FALSE(selection_condition(GameMatrix{3, 0, 5, 1}, 0.5));
  // ring20 with sigma = 1.4: donation b=7 clears the b* = 6 threshold
  CHECK(selection_condition(GameMatrix::donation(7.0, 1.0), 1.4));
  CHECK_FALSE(selection_condition(GameMatrix::donation(5.0, 1.0), 1.4));
  CHECK_THROWS_AS(
      selection_condition(GameMatrix::donation(2.0, 1.0),
                          std::numeric_limits<double>::infinity()),
      std::invalid_argument);
}
