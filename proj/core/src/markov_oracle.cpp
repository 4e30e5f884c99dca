#include "coopnet/markov_oracle.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

namespace coopnet {

namespace {

constexpr int kMaxNodes = 14;
constexpr double kMinCopyWeight = 1e-12;
constexpr double kResidualTarget = 1e-12;

double payoff_from_count(const GameMatrix& game, bool cooperator,
                         int coop_neighbors, int degree) {
  const double cn = static_cast<double>(coop_neighbors);
  const double dn = static_cast<double>(degree - coop_neighbors);
  const double total = cooperator ? game.R * cn + game.S * dn
                                  : game.T * cn + game.P * dn;
  return total / static_cast<double>(degree);
}

}  // namespace

double ChainSolution::uniform_single_c() const {
  double sum = 0.0;
  for (int x = 0; x < n; ++x) sum += single_c(x);
  return sum / static_cast<double>(n);
}

ChainSolution exact_fixation_markov(const Graph& g, const GameMatrix& game,
                                    double delta) {
  const int n = g.node_count();
  if (n < 2 || n > kMaxNodes) {
    throw std::invalid_argument(
        "exact_fixation_markov: need 2 <= n <= " + std::to_string(kMaxNodes));
  }
  if (!is_connected(g)) {
    throw std::invalid_argument(
        "exact_fixation_markov: graph is disconnected");
  }

  std::vector<std::uint32_t> nbr_mask(n, 0);
  std::vector<int> deg(n);
  for (int x = 0; x < n; ++x) {
    for (int y : g.neighbors(x)) nbr_mask[x] |= (1u << y);
    deg[x] = g.degree(x);
  }

  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  const std::uint32_t states = full + 1;

  // Transient states are everything except 0 and full; compact indices.
  const auto transient_index = [full](std::uint32_t s) {
    return static_cast<long>(s) - 1;  // states 1..full-1 map to 0..full-2
  };
  const long dim = static_cast<long>(full) - 1;

  // Row for state s: h(s) - sum_x P(flip x | move) h(s ^ bit x) = rhs,
  // where self-loops are stripped by conditioning on a flip happening.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(dim) * (n + 1));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);

  std::vector<double> flip(n);
  for (std::uint32_t s = 1; s < full; ++s) {
    double flip_total = 0.0;
    for (int x = 0; x < n; ++x) {
      // Weighted share of x's neighbors whose strategy differs from s_x.
      double w_same = 0.0;
      double w_diff = 0.0;
      const bool sx = (s >> x) & 1u;
      std::uint32_t m = nbr_mask[x];
      while (m != 0) {
        const int y = std::countr_zero(m);
        m &= m - 1;
        const bool sy = (s >> y) & 1u;
        const int cn = std::popcount(s & nbr_mask[y]);
        const double w =
            1.0 + delta * payoff_from_count(game, sy, cn, deg[y]);
        if (w <= kMinCopyWeight) {
          std::ostringstream msg;
          msg << "exact_fixation_markov: copying weight " << w << " at node "
              << y << " not positive for delta " << delta;
          throw std::runtime_error(msg.str());
        }
        if (sy == sx) {
          w_same += w;
        } else {
          w_diff += w;
        }
      }
      flip[x] = w_diff / (w_same + w_diff) / static_cast<double>(n);
      flip_total += flip[x];
    }
    // Mixed state in a connected graph always has a discordant edge.
    const long row = transient_index(s);
    triplets.emplace_back(row, row, 1.0);
    for (int x = 0; x < n; ++x) {
      if (flip[x] == 0.0) continue;
      const double share = flip[x] / flip_total;
      const std::uint32_t t = s ^ (1u << x);
      if (t == full) {
        rhs[row] += share;
      } else if (t != 0) {
        triplets.emplace_back(row, transient_index(t), -share);
      }
    }
  }

  Eigen::SparseMatrix<double> A(dim, dim);
  A.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> solver;
  solver.setTolerance(1e-14);
  solver.setMaxIterations(20000);
  solver.compute(A);
  Eigen::VectorXd h = solver.solve(rhs);

  double residual = (rhs - A * h).lpNorm<Eigen::Infinity>();
  if (!(residual <= kResidualTarget)) {
    // Richardson polish: h <- h + (rhs - A h); contraction since A = I - Q
    // with Q substochastic on the transient block.
    for (int sweep = 0; sweep < 200000 && residual > kResidualTarget;
         ++sweep) {
      h += rhs - A * h;
      residual = (rhs - A * h).lpNorm<Eigen::Infinity>();
    }
    if (!(residual <= kResidualTarget)) {
      std::ostringstream msg;
      msg << "exact_fixation_markov: chain solve stalled at residual "
          << residual;
      throw std::runtime_error(msg.str());
    }
  }

  ChainSolution sol;
  sol.n = n;
  sol.delta = delta;
  sol.rho_by_initial.assign(states, 0.0);
  sol.rho_by_initial[full] = 1.0;
  for (std::uint32_t s = 1; s < full; ++s) {
    sol.rho_by_initial[s] = h[transient_index(s)];
  }
  return sol;
}

double fixation_slope(const Graph& g, const GameMatrix& game) {
  constexpr double kDelta = 1e-4;
  const ChainSolution plus = exact_fixation_markov(g, game, kDelta);
  const ChainSolution minus = exact_fixation_markov(g, game, -kDelta);
  return (plus.uniform_single_c() - minus.uniform_single_c()) / (2.0 * kDelta);
}

}  // namespace coopnet
