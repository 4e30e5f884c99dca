#pragma once

#include <cstdint>
#include <vector>

#include "coopnet/game.hpp"
#include "coopnet/graph.hpp"
#include "coopnet/rng.hpp"

namespace coopnet {

/// Per-node strategy, 1 = cooperate, 0 = defect.
using StrategyState = std::vector<std::uint8_t>;

struct TrialSummary {
  long long trials = 0;
  long long fixations_c = 0;
  double estimate = 0.0;
  double std_error = 0.0;  // binomial, sqrt(est (1-est) / trials)
};

/// Averaged payoffs: f_x is the mean game payoff of x against its neighbors.
/// For the donation game this reduces to -c s_x + (b/k_x) sum_{y~x} s_y.
std::vector<double> payoffs(const Graph& g, const StrategyState& state,
                            const GameMatrix& game);

/// One death-birth update: a uniformly chosen node adopts the strategy of a
/// neighbor y drawn with probability proportional to 1 + delta f_y (no
/// self-copying). delta = 0 is a voter-model step.
StrategyState step(const Graph& g, const StrategyState& state,
                   const GameMatrix& game, double delta, Rng& rng);

/// Run updates until unanimity; true iff cooperation fixed. max_steps = 0
/// means the default cap of 1e4 * n^2 (exceeding it raises an error, as a
/// wiring-bug tripwire rather than an expected outcome).
bool run_to_fixation(const Graph& g, const StrategyState& initial,
                     const GameMatrix& game, double delta, Rng& rng,
                     long long max_steps = 0);

/// Where the single initial cooperator is placed in each trial.
struct Placement {
  enum class Kind { UniformRandom, FixedNode };
  Kind kind = Kind::UniformRandom;
  int node = -1;

  static Placement uniform_random() { return {}; }
  static Placement fixed_node(int x) { return {Kind::FixedNode, x}; }
};

/// Independent fixation trials, each on its own random stream derived from
/// (master_seed, trial index), so the result does not depend on execution
/// order or worker count.
TrialSummary estimate_fixation(const Graph& g, const GameMatrix& game,
                               double delta, long long trials,
                               Placement placement, std::uint64_t master_seed);

}  // namespace coopnet
