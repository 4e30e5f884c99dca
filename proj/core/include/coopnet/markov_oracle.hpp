#pragma once

#include <vector>

#include "coopnet/game.hpp"
#include "coopnet/graph.hpp"

namespace coopnet {

/// Exhaustive absorbing-chain solution over all 2^n strategy states (bit x
/// of the index = strategy of node x). Ground truth for the first-order
/// fixation formula and the Monte Carlo simulator on tiny graphs.
struct ChainSolution {
  int n = 0;
  double delta = 0.0;
  std::vector<double> rho_by_initial;  // size 2^n, hitting prob of all-C

  double single_c(int x) const { return rho_by_initial[1u << x]; }
  /// Average over the n single-cooperator initial states.
  double uniform_single_c() const;
};

/// Build the one-step transition law of the death-birth process over every
/// state and solve for the probability of absorbing at all-C. delta may be
/// negative as long as every copying weight 1 + delta*f stays positive
/// (needed for central differencing).
ChainSolution exact_fixation_markov(const Graph& g, const GameMatrix& game,
                                    double delta);

/// d rho / d delta at delta = 0 of the uniform single-cooperator fixation
/// probability, via central difference at delta = 1e-4.
double fixation_slope(const Graph& g, const GameMatrix& game);

}  // namespace coopnet
