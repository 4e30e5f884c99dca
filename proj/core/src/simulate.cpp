#include "coopnet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace coopnet {

namespace {

constexpr double kMinCopyWeight = 1e-12;

void check_state(const Graph& g, const StrategyState& state,
                 const char* who) {
  if (static_cast<int>(state.size()) != g.node_count()) {
    throw std::invalid_argument(std::string(who) +
                                ": state size does not match the graph");
  }
}

[[noreturn]] void weight_fail(int node, double weight) {
  std::ostringstream msg;
  msg << "copying weight 1 + delta*f = " << weight << " at node " << node
      << " is not positive; reduce delta";
  throw std::runtime_error(msg.str());
}

// Payoff of y from its cooperator-neighbor count, O(1).
inline double payoff_from_count(const GameMatrix& game, bool cooperator,
                                int coop_neighbors, int degree) {
  const double cn = static_cast<double>(coop_neighbors);
  const double dn = static_cast<double>(degree - coop_neighbors);
  const double total = cooperator ? game.R * cn + game.S * dn
                                  : game.T * cn + game.P * dn;
  return total / static_cast<double>(degree);
}

long long default_cap(int n) {
  return 10000LL * static_cast<long long>(n) * static_cast<long long>(n);
}

// One trial on pre-allocated buffers. c_count is rebuilt from the state.
bool run_trial(const Graph& g, const GameMatrix& game, double delta,
               long long max_steps, StrategyState& s,
               std::vector<int>& c_count, std::vector<double>& weights,
               Rng& rng) {
  const int n = g.node_count();
  long long c_total = 0;
  for (int x = 0; x < n; ++x) c_total += s[x];
  for (int x = 0; x < n; ++x) {
    int cn = 0;
    for (int y : g.neighbors(x)) cn += s[y];
    c_count[x] = cn;
  }

  long long steps = 0;
  while (c_total != 0 && c_total != n) {
    if (steps >= max_steps) {
      std::ostringstream msg;
      msg << "run_to_fixation: no unanimity after " << steps
          << " steps (cap reached)";
      throw std::runtime_error(msg.str());
    }
    ++steps;

    const int x = rng.below_int(n);
    const auto nbrs = g.neighbors(x);
    const int k = static_cast<int>(nbrs.size());
    double total = 0.0;
    for (int t = 0; t < k; ++t) {
      const int y = nbrs[t];
      const double w =
          1.0 + delta * payoff_from_count(game, s[y] != 0, c_count[y],
                                          g.degree(y));
      if (w <= kMinCopyWeight) weight_fail(y, w);
      weights[t] = w;
      total += w;
    }
    const double r = rng.uniform01() * total;
    double acc = 0.0;
    int chosen = k - 1;
    for (int t = 0; t < k; ++t) {
      acc += weights[t];
      if (r < acc) {
        chosen = t;
        break;
      }
    }
    const std::uint8_t adopted = s[nbrs[chosen]];
    if (adopted != s[x]) {
      s[x] = adopted;
      const int d = adopted ? 1 : -1;
      c_total += d;
      for (int z : nbrs) c_count[z] += d;
    }
  }
  return c_total == n;
}

}  // namespace

std::vector<double> payoffs(const Graph& g, const StrategyState& state,
                            const GameMatrix& game) {
  check_state(g, state, "payoffs");
  const int n = g.node_count();
  std::vector<double> f(n);
  for (int x = 0; x < n; ++x) {
    const int k = g.degree(x);
    if (k == 0) {
      throw std::invalid_argument("payoffs: node " + std::to_string(x) +
                                  " is isolated");
    }
    int cn = 0;
    for (int y : g.neighbors(x)) cn += state[y];
    f[x] = payoff_from_count(game, state[x] != 0, cn, k);
  }
  return f;
}

StrategyState step(const Graph& g, const StrategyState& state,
                   const GameMatrix& game, double delta, Rng& rng) {
  check_state(g, state, "step");
  if (delta < 0.0) throw std::invalid_argument("step: delta must be >= 0");
  const std::vector<double> f = payoffs(g, state, game);

  const int x = rng.below_int(g.node_count());
  const auto nbrs = g.neighbors(x);
  double total = 0.0;
  for (int y : nbrs) {
    const double w = 1.0 + delta * f[y];
    if (w <= kMinCopyWeight) weight_fail(y, w);
    total += w;
  }
  const double r = rng.uniform01() * total;
  double acc = 0.0;
  int chosen = nbrs[nbrs.size() - 1];
  for (int y : nbrs) {
    acc += 1.0 + delta * f[y];
    if (r < acc) {
      chosen = y;
      break;
    }
  }
  StrategyState next = state;
  next[x] = state[chosen];
  return next;
}

bool run_to_fixation(const Graph& g, const StrategyState& initial,
                     const GameMatrix& game, double delta, Rng& rng,
                     long long max_steps) {
  check_state(g, initial, "run_to_fixation");
  if (delta < 0.0) {
    throw std::invalid_argument("run_to_fixation: delta must be >= 0");
  }
  if (!is_connected(g)) {
    throw std::invalid_argument("run_to_fixation: graph is disconnected");
  }
  if (max_steps <= 0) max_steps = default_cap(g.node_count());

  StrategyState s = initial;
  std::vector<int> c_count(g.node_count());
  std::vector<double> weights(static_cast<size_t>(g.node_count()));
  return run_trial(g, game, delta, max_steps, s, c_count, weights, rng);
}

TrialSummary estimate_fixation(const Graph& g, const GameMatrix& game,
                               double delta, long long trials,
                               Placement placement,
                               std::uint64_t master_seed) {
  const int n = g.node_count();
  if (trials < 1) {
    throw std::invalid_argument("estimate_fixation: trials must be >= 1");
  }
  if (delta < 0.0) {
    throw std::invalid_argument("estimate_fixation: delta must be >= 0");
  }
  if (!is_connected(g)) {
    throw std::invalid_argument("estimate_fixation: graph is disconnected");
  }
  if (placement.kind == Placement::Kind::FixedNode &&
      (placement.node < 0 || placement.node >= n)) {
    throw std::invalid_argument(
        "estimate_fixation: fixed placement node out of range");
  }

  const long long max_steps = default_cap(n);
  StrategyState s(static_cast<size_t>(n));
  std::vector<int> c_count(n);
  std::vector<double> weights(static_cast<size_t>(n));

  long long fixed = 0;
  for (long long t = 0; t < trials; ++t) {
    Rng rng(derive_seed(master_seed, {static_cast<std::uint64_t>(t)}));
    std::fill(s.begin(), s.end(), std::uint8_t{0});
    const int start = placement.kind == Placement::Kind::UniformRandom
                          ? rng.below_int(n)
                          : placement.node;
    s[start] = 1;
    if (run_trial(g, game, delta, max_steps, s, c_count, weights, rng)) {
      ++fixed;
    }
  }

  TrialSummary out;
  out.trials = trials;
  out.fixations_c = fixed;
  out.estimate = static_cast<double>(fixed) / static_cast<double>(trials);
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) /
                            static_cast<double>(trials));
  return out;
}

}  // namespace coopnet
