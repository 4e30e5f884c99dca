#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "coopnet/generators.hpp"
#include "coopnet/graph.hpp"
#include "coopnet/markov_oracle.hpp"
#include "coopnet/rng.hpp"
#include "coopnet/simulate.hpp"

using namespace coopnet;

namespace {

Graph complete(int n) {
  std::vector<Graph::Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) edges.push_back({u, v});
  }
  return Graph::from_edge_list(n, edges);
}

Graph star(int leaves) {
  std::vector<Graph::Edge> edges;
  for (int v = 1; v <= leaves; ++v) edges.push_back({0, v});
  return Graph::from_edge_list(leaves + 1, edges);
}

Graph path(int n) {
  std::vector<Graph::Edge> edges;
  for (int u = 0; u + 1 < n; ++u) edges.push_back({u, u + 1});
  return Graph::from_edge_list(n, edges);
}

const GameMatrix kDonation = GameMatrix::donation(2.0, 1.0);

}  // namespace

TEST_CASE("payoffs average the game matrix over neighbors") {
  const Graph g = path(3);
  const StrategyState state = {1, 0, 1};  // C D C
  const std::vector<double> f = payoffs(g, state, kDonation);
  // donation b=2, c=1: R=1, S=-1, T=2, P=0
  CHECK(f[0] == doctest::Approx(-1.0));          // C against D
  CHECK(f[1] == doctest::Approx(2.0));           // D against two Cs
  CHECK(f[2] == doctest::Approx(-1.0));
  const std::vector<double> all_c = payoffs(g, {1, 1, 1}, kDonation);
  CHECK(all_c[0] == doctest::Approx(1.0));       // R = b - c
  CHECK(all_c[1] == doctest::Approx(1.0));
}

TEST_CASE("a step changes at most one node and keeps unanimity absorbing") {
  const Graph g = complete(5);
  Rng rng(21);
  StrategyState state = {1, 0, 1, 0, 0};
  for (int t = 0; t < 200; ++t) {
    const StrategyState next = step(g, state, kDonation, 0.01, rng);
    int changed = 0;
    for (int x = 0; x < 5; ++x) changed += next[x] != state[x];
    CHECK(changed <= 1);
    state = next;
  }
  const StrategyState all_d = {0, 0, 0, 0, 0};
  const StrategyState stay = step(g, all_d, kDonation, 0.01, rng);
  CHECK(stay == all_d);
}

TEST_CASE("run_to_fixation reaches unanimity and flags the winner") {
  const Graph g = complete(4);
  Rng rng(77);
  int c_wins = 0;
  for (int t = 0; t < 200; ++t) {
    StrategyState initial = {0, 0, 0, 0};
    initial[static_cast<size_t>(rng.below_int(4))] = 1;
    c_wins += run_to_fixation(g, initial, kDonation, 0.0, rng) ? 1 : 0;
  }
  CHECK(c_wins > 20);
  CHECK(c_wins < 80);
}

TEST_CASE("run_to_fixation enforces its step cap") {
  const Graph g = complete(4);
  Rng rng(5);
  const StrategyState initial = {1, 0, 1, 0};
  CHECK_THROWS_AS(run_to_fixation(g, initial, kDonation, 0.0, rng, 2),
                  std::runtime_error);
}

TEST_CASE("estimates are reproducible and independent of trial order") {
  const Graph g = complete(6);
  const TrialSummary a =
      estimate_fixation(g, kDonation, 0.01, 4000, Placement::uniform_random(),
                        99);
  const TrialSummary b =
      estimate_fixation(g, kDonation, 0.01, 4000, Placement::uniform_random(),
                        99);
  CHECK(a.fixations_c == b.fixations_c);
  CHECK(a.estimate == b.estimate);
  const TrialSummary c =
      estimate_fixation(g, kDonation, 0.01, 4000, Placement::uniform_random(),
                        100);
  CHECK(a.fixations_c != c.fixations_c);
}

TEST_CASE("summary fields are internally consistent") {
  const TrialSummary s =
      estimate_fixation(complete(5), kDonation, 0.0, 2000,
                        Placement::uniform_random(), 7);
  CHECK(s.trials == 2000);
  CHECK(s.estimate ==
        doctest::Approx(static_cast<double>(s.fixations_c) / 2000));
  CHECK(s.std_error ==
        doctest::Approx(std::sqrt(s.estimate * (1 - s.estimate) / 2000)));
}

TEST_CASE("neutral drift reproduces the degree-weighted fixation law") {
  // uniform placement on a regular graph: 1/n
  const TrialSummary uniform =
      estimate_fixation(complete(8), kDonation, 0.0, 40000,
                        Placement::uniform_random(), 11);
  CHECK(std::fabs(uniform.estimate - 0.125) <= 3.5 * uniform.std_error);

  // star center carries half the total degree
  const TrialSummary center =
      estimate_fixation(star(6), kDonation, 0.0, 40000,
                        Placement::fixed_node(0), 13);
  CHECK(std::fabs(center.estimate - 0.5) <= 3.5 * center.std_error);

  const TrialSummary leaf =
      estimate_fixation(star(6), kDonation, 0.0, 40000,
                        Placement::fixed_node(1), 17);
  CHECK(std::fabs(leaf.estimate - 1.0 / 12.0) <= 3.5 * leaf.std_error);
}

TEST_CASE("monte carlo agrees with exhaustive enumeration under selection") {
  GeneratorSpec spec;
  spec.family = Family::ER;
  spec.n = 8;
  spec.seed = 23;
  spec.params = {{"p", 0.4}};
  const Graph g = ensure_connected(spec);
  const double delta = 0.02;
  const ChainSolution oracle = exact_fixation_markov(g, kDonation, delta);
  const TrialSummary mc =
      estimate_fixation(g, kDonation, delta, 200000,
                        Placement::uniform_random(), 31);
  CHECK(std::fabs(mc.estimate - oracle.uniform_single_c()) <=
        4.0 * mc.std_error);
}

TEST_CASE("placement validation") {
  CHECK_THROWS_AS(estimate_fixation(complete(4), kDonation, 0.0, 10,
                                    Placement::fixed_node(9), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_fixation(complete(4), kDonation, 0.0, 0,
                                    Placement::uniform_random(), 1),
                  std::invalid_argument);
}
