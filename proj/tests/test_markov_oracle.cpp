#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "coopnet/generators.hpp"
#include "coopnet/graph.hpp"
#include "coopnet/markov_oracle.hpp"
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

Graph ring(int n) {
  std::vector<Graph::Edge> edges;
  for (int u = 0; u < n; ++u) edges.push_back({u, (u + 1) % n});
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

TEST_CASE("neutral fixation on the triangle is uniform") {
  const ChainSolution sol = exact_fixation_markov(complete(3), kDonation, 0.0);
  REQUIRE(sol.rho_by_initial.size() == 8);
  CHECK(sol.rho_by_initial[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(sol.rho_by_initial[7] == doctest::Approx(1.0).epsilon(1e-14));
  for (int x = 0; x < 3; ++x) {
    CHECK(sol.single_c(x) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  }
  CHECK(sol.uniform_single_c() == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("neutral fixation weighs nodes by degree") {
  // the conserved quantity sum_x k_x s_x forces rho_x = k_x / sum k
  const ChainSolution star_sol =
      exact_fixation_markov(star(3), kDonation, 0.0);
  CHECK(star_sol.single_c(0) == doctest::Approx(0.5).epsilon(1e-10));
  for (int leaf = 1; leaf <= 3; ++leaf) {
    CHECK(star_sol.single_c(leaf) ==
          doctest::Approx(1.0 / 6.0).epsilon(1e-10));
  }

  GeneratorSpec spec;
  spec.family = Family::ER;
  spec.n = 7;
  spec.seed = 5;
  spec.params = {{"p", 0.45}};
  const Graph g = ensure_connected(spec);
  const ChainSolution sol = exact_fixation_markov(g, kDonation, 0.0);
  double degree_sum = 0.0;
  for (int x = 0; x < g.node_count(); ++x) degree_sum += g.degree(x);
  for (int x = 0; x < g.node_count(); ++x) {
    CHECK(sol.single_c(x) ==
          doctest::Approx(g.degree(x) / degree_sum).epsilon(1e-10));
  }
}

TEST_CASE("neutral fixation from any state sums the single-node values") {
  const Graph g = path(5);
  const ChainSolution sol = exact_fixation_markov(g, kDonation, 0.0);
  double degree_sum = 0.0;
  for (int x = 0; x < g.node_count(); ++x) degree_sum += g.degree(x);
  for (unsigned state = 0; state < 32; ++state) {
    double expect = 0.0;
    for (int x = 0; x < 5; ++x) {
      if (state & (1u << x)) expect += g.degree(x) / degree_sum;
    }
    CHECK(sol.rho_by_initial[state] ==
          doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("fixation slope of the complete graph, frozen value") {
  CHECK(fixation_slope(complete(4), kDonation) ==
        doctest::Approx(-10.0 / 24.0).epsilon(1e-6));
}

TEST_CASE("slope sign flips across the critical ratio") {
  const Graph g = ring(6);  // critical ratio (6-2)/(3-2) = 4
  CHECK(fixation_slope(g, GameMatrix::donation(4.5, 1.0)) > 0.0);
  CHECK(fixation_slope(g, GameMatrix::donation(3.5, 1.0)) < 0.0);
  CHECK(std::fabs(fixation_slope(g, GameMatrix::donation(4.0, 1.0))) < 1e-6);
}

TEST_CASE("enumerated fixation matches the first-order formula to O(delta^2)") {
  for (const Graph& g : {complete(4), path(4), ring(6), star(4)}) {
    const CoalescenceSummary cs = remeeting_times(g, meeting_times(g));
    const double n = g.node_count();
    const double delta = 0.01;
    const ChainSolution sol = exact_fixation_markov(g, kDonation, delta);
    const double linear =
        fixation_probability_exact(g, cs, 2.0, 1.0, delta);
    CHECK(std::fabs(sol.uniform_single_c() - linear) < 5e-4);
    (void)n;
  }
}

TEST_CASE("quadratic error shrinks fourfold when delta halves") {
  const Graph g = path(4);
  const CoalescenceSummary cs = remeeting_times(g, meeting_times(g));
  auto quadratic_error = [&](double delta) {
    const ChainSolution sol = exact_fixation_markov(g, kDonation, delta);
    return std::fabs(sol.uniform_single_c() -
                     fixation_probability_exact(g, cs, 2.0, 1.0, delta));
  };
  const double e4 = quadratic_error(0.04);
  const double e2 = quadratic_error(0.02);
  const double e1 = quadratic_error(0.01);
  REQUIRE(e1 > 1e-12);  // far enough from roundoff to trust the ratios
  CHECK(e4 / e2 == doctest::Approx(4.0).epsilon(0.35));
  CHECK(e2 / e1 == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("negative delta is accepted and mirrors the slope") {
  const Graph g = complete(4);
  const ChainSolution down = exact_fixation_markov(g, kDonation, 0.01);
  const ChainSolution up = exact_fixation_markov(g, kDonation, -0.01);
  CHECK(down.uniform_single_c() < 0.25);
  CHECK(up.uniform_single_c() > 0.25);
}
