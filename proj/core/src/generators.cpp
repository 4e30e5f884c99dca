#include "coopnet/generators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "coopnet/rng.hpp"

namespace coopnet {

namespace {

using Edge = Graph::Edge;

Edge make_edge(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// One draw proportional to the (nonnegative) weights; the pick's weight is
// zeroed so consecutive draws are without replacement.
int draw_weighted(Rng& rng, std::vector<double>& weight, double& total) {
  const double r = rng.uniform01() * total;
  double acc = 0.0;
  int pick = -1;
  for (size_t u = 0; u < weight.size(); ++u) {
    if (weight[u] <= 0.0) continue;
    acc += weight[u];
    if (r < acc) {
      pick = static_cast<int>(u);
      break;
    }
  }
  if (pick < 0) {  // round-off spill: take the last available entry
    for (int u = static_cast<int>(weight.size()) - 1; u >= 0; --u) {
      if (weight[u] > 0.0) {
        pick = u;
        break;
      }
    }
  }
  if (pick < 0) {
    throw std::logic_error("draw_weighted: no positive weight left");
  }
  total -= weight[pick];
  weight[pick] = 0.0;
  return pick;
}

std::vector<Edge> clique_edges(int size) {
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(size) * (size - 1) / 2);
  for (int i = 0; i < size; ++i) {
    for (int j = i + 1; j < size; ++j) edges.emplace_back(i, j);
  }
  return edges;
}

// Shared skeleton of the growth models: clique seed on links+1 nodes, then
// one arrival at a time attaching `links` distinct targets drawn from
// per-arrival weights supplied by `node_weight(u, v)`.
template <typename WeightFn>
Graph grow_by_attachment(int n, int links, Rng& rng, WeightFn node_weight) {
  require(n >= links + 1, "growth model needs n >= links_per_node + 1");
  std::vector<Edge> edges = clique_edges(links + 1);
  std::vector<int> deg(n, 0);
  for (int u = 0; u <= links; ++u) deg[u] = links;

  std::vector<double> weight;
  for (int v = links + 1; v < n; ++v) {
    weight.assign(v, 0.0);
    double total = 0.0;
    for (int u = 0; u < v; ++u) {
      weight[u] = node_weight(u, v, deg[u]);
      total += weight[u];
    }
    for (int t = 0; t < links; ++t) {
      const int pick = draw_weighted(rng, weight, total);
      edges.push_back(make_edge(pick, v));
      ++deg[pick];
    }
    deg[v] = links;
  }
  return Graph::from_edge_list(n, std::move(edges));
}

}  // namespace

Graph gen_sbm(const SbmParams& params, uint64_t seed) {
  params.validate();
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i < params.n; ++i) {
    for (int j = i + 1; j < params.n; ++j) {
      const double prob = (i % params.m == j % params.m) ? params.p : params.q;
      if (rng.bernoulli(prob)) edges.emplace_back(i, j);
    }
  }
  return Graph::from_edge_list(params.n, std::move(edges));
}

Graph gen_er(int n, double p, uint64_t seed) {
  require(n >= 1, "gen_er: n must be >= 1");
  require(p >= 0.0 && p <= 1.0, "gen_er: p must be in [0,1]");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) edges.emplace_back(i, j);
    }
  }
  return Graph::from_edge_list(n, std::move(edges));
}

Graph gen_small_world(int n, int lattice_degree, double p_add, uint64_t seed) {
  require(lattice_degree >= 2 && lattice_degree % 2 == 0,
          "gen_small_world: lattice_degree must be even and >= 2");
  require(lattice_degree < n,
          "gen_small_world: lattice_degree must be smaller than n");
  require(p_add >= 0.0 && p_add <= 1.0,
          "gen_small_world: p_add must be in [0,1]");
  Rng rng(seed);
  const int half = lattice_degree / 2;
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int s = 1; s <= half; ++s) edges.push_back(make_edge(i, (i + s) % n));
  }
  // Scale the per-pair probability so the expected number of shortcuts is
  // p_add * n * lattice_degree / 2.
  if (n - 1 > lattice_degree && p_add > 0.0) {
    const double prob = std::min(
        1.0, p_add * lattice_degree / (n - 1.0 - lattice_degree));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const int d = std::min(j - i, n - (j - i));
        if (d <= half) continue;
        if (rng.bernoulli(prob)) edges.emplace_back(i, j);
      }
    }
  }
  return Graph::from_edge_list(n, std::move(edges));
}

Graph gen_pa_shifted(int n, int links_per_node, double attractiveness,
                     uint64_t seed) {
  require(links_per_node >= 1 && links_per_node <= 5,
          "gen_pa_shifted: links_per_node must be in 1..5");
  require(attractiveness >= 0.0,
          "gen_pa_shifted: attractiveness must be >= 0");
  Rng rng(seed);
  return grow_by_attachment(
      n, links_per_node, rng,
      [attractiveness](int, int, int deg) { return deg + attractiveness; });
}

Graph gen_pa_superlinear(int n, int links_per_node, double theta,
                         uint64_t seed) {
  require(links_per_node >= 1 && links_per_node <= 4,
          "gen_pa_superlinear: links_per_node must be in 1..4");
  require(theta >= 0.0 && theta <= 3.0,
          "gen_pa_superlinear: theta must be in [0,3]");
  Rng rng(seed);
  return grow_by_attachment(n, links_per_node, rng,
                            [theta](int, int, int deg) {
                              return deg > 0 ? std::pow(deg, theta) : 1.0;
                            });
}

Graph gen_holme_kim(int n, int links_per_node, double p_triad, uint64_t seed) {
  require(links_per_node >= 1 && links_per_node <= 5,
          "gen_holme_kim: links_per_node must be in 1..5");
  require(p_triad >= 0.0 && p_triad <= 1.0,
          "gen_holme_kim: p_triad must be in [0,1]");
  const int links = links_per_node;
  require(n >= links + 1, "gen_holme_kim: need n >= links_per_node + 1");
  Rng rng(seed);

  std::vector<Edge> edges = clique_edges(links + 1);
  std::vector<std::vector<int>> adj(n);
  std::vector<int> deg(n, 0);
  for (int i = 0; i <= links; ++i) {
    for (int j = 0; j <= links; ++j) {
      if (i != j) adj[i].push_back(j);
    }
    deg[i] = links;
  }

  std::vector<double> weight;
  std::vector<char> chosen;
  std::vector<int> picks, candidates;
  for (int v = links + 1; v < n; ++v) {
    weight.assign(v, 0.0);
    chosen.assign(v, 0);
    double total = 0.0;
    for (int u = 0; u < v; ++u) {
      weight[u] = deg[u];
      total += weight[u];
    }
    picks.clear();
    int prev = -1;
    for (int t = 0; t < links; ++t) {
      int pick = -1;
      if (t > 0 && rng.bernoulli(p_triad)) {
        candidates.clear();
        for (int u : adj[prev]) {
          if (u != v && !chosen[u]) candidates.push_back(u);
        }
        if (!candidates.empty()) {
          pick = candidates[rng.below_int(static_cast<int>(candidates.size()))];
          total -= weight[pick];
          weight[pick] = 0.0;
        }
      }
      if (pick < 0) pick = draw_weighted(rng, weight, total);
      chosen[pick] = 1;
      picks.push_back(pick);
      prev = pick;
    }
    for (int pick : picks) {
      edges.push_back(make_edge(pick, v));
      adj[pick].push_back(v);
      adj[v].push_back(pick);
      ++deg[pick];
    }
    deg[v] = links;
  }
  return Graph::from_edge_list(n, std::move(edges));
}

Graph gen_klemm_eguiluz(int n, int links_per_node, double crossover,
                        uint64_t seed) {
  require(links_per_node >= 1 && links_per_node <= 5,
          "gen_klemm_eguiluz: links_per_node must be in 1..5");
  require(crossover >= 0.0 && crossover <= 1.0,
          "gen_klemm_eguiluz: crossover must be in [0,1]");
  const int links = links_per_node;
  require(n >= links + 1, "gen_klemm_eguiluz: need n >= links_per_node + 1");
  Rng rng(seed);

  std::vector<Edge> edges = clique_edges(links + 1);
  std::vector<int> deg(n, 0);
  for (int u = 0; u <= links; ++u) deg[u] = links;
  std::vector<int> active;
  for (int u = 0; u < links; ++u) active.push_back(u);

  std::vector<double> weight;
  std::vector<char> chosen;
  std::vector<int> picks;
  for (int v = links + 1; v < n; ++v) {
    weight.assign(v, 0.0);
    chosen.assign(v, 0);
    double total = 0.0;
    for (int u = 0; u < v; ++u) {
      weight[u] = deg[u];
      total += weight[u];
    }
    picks.clear();
    for (int a : active) {
      int target = -1;
      if (!rng.bernoulli(crossover) && !chosen[a]) {
        target = a;
        total -= weight[target];
        weight[target] = 0.0;
      } else {
        target = draw_weighted(rng, weight, total);
      }
      chosen[target] = 1;
      picks.push_back(target);
    }
    for (int target : picks) {
      edges.push_back(make_edge(target, v));
      ++deg[target];
    }
    deg[v] = links;

    // The arrival activates; one old active node retires with probability
    // inversely proportional to its degree.
    double inv_total = 0.0;
    for (int a : active) inv_total += 1.0 / deg[a];
    const double r = rng.uniform01() * inv_total;
    double acc = 0.0;
    size_t out = active.size() - 1;
    for (size_t idx = 0; idx < active.size(); ++idx) {
      acc += 1.0 / deg[active[idx]];
      if (r < acc) {
        out = idx;
        break;
      }
    }
    active.erase(active.begin() + static_cast<long>(out));
    active.insert(std::lower_bound(active.begin(), active.end(), v), v);
  }
  return Graph::from_edge_list(n, std::move(edges));
}

Graph gen_spatial_sf(int n, int links_per_node, double r_c, uint64_t seed,
                     std::vector<std::pair<double, double>>* positions_out) {
  require(links_per_node >= 1, "gen_spatial_sf: links_per_node must be >= 1");
  require(r_c > 0.0, "gen_spatial_sf: r_c must be positive");
  require(n >= links_per_node + 1,
          "gen_spatial_sf: need n >= links_per_node + 1");
  Rng rng(seed);

  std::vector<std::pair<double, double>> pos(n);
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform01();
    const double y = rng.uniform01();
    pos[i] = {x, y};
  }
  Graph g = grow_by_attachment(
      n, links_per_node, rng, [&pos, r_c](int u, int v, int deg) {
        const double dx = pos[u].first - pos[v].first;
        const double dy = pos[u].second - pos[v].second;
        const double d = std::sqrt(dx * dx + dy * dy);
        return deg * std::exp(-d / r_c);
      });
  if (positions_out) *positions_out = std::move(pos);
  return g;
}

Graph gen_ucm(int n, double gamma, int k_min, uint64_t seed) {
  require(n >= 2, "gen_ucm: n must be >= 2");
  require(k_min >= 1, "gen_ucm: k_min must be >= 1");
  require(gamma >= 1.0 && gamma <= 4.0, "gen_ucm: gamma must be in [1,4]");
  const int k_max = static_cast<int>(std::floor(std::sqrt(
      static_cast<double>(n))));
  require(k_min <= k_max,
          "gen_ucm: k_min exceeds the structural cutoff sqrt(n)");
  Rng rng(seed);

  // Degree distribution P(k) proportional to k^-gamma on [k_min, k_max].
  std::vector<double> cumulative;
  double total = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    total += std::pow(static_cast<double>(k), -gamma);
    cumulative.push_back(total);
  }
  std::vector<int> deg(n);
  long long stub_count = 0;
  for (int u = 0; u < n; ++u) {
    const double r = rng.uniform01() * total;
    int k = k_max;
    for (size_t idx = 0; idx < cumulative.size(); ++idx) {
      if (r < cumulative[idx]) {
        k = k_min + static_cast<int>(idx);
        break;
      }
    }
    deg[u] = k;
    stub_count += k;
  }
  if (stub_count % 2 != 0) {
    const int u = rng.below_int(n);
    if (deg[u] < k_max) {
      ++deg[u];
      ++stub_count;
    } else if (deg[u] > k_min) {
      --deg[u];
      --stub_count;
    } else {
      ++deg[u];  // k_min == k_max: single-value distribution, must spill
      ++stub_count;
    }
  }

  std::vector<int> stubs;
  stubs.reserve(static_cast<size_t>(stub_count));
  for (int u = 0; u < n; ++u) {
    for (int k = 0; k < deg[u]; ++k) stubs.push_back(u);
  }

  const auto pair_key = [n](int u, int v) {
    return static_cast<long long>(std::min(u, v)) * n + std::max(u, v);
  };
  constexpr int kRestarts = 50;
  constexpr int kRedrawBudget = 200;
  std::vector<int> work;
  std::unordered_set<long long> used;
  std::vector<Edge> edges;
  for (int restart = 0; restart < kRestarts; ++restart) {
    work = stubs;
    for (size_t i = work.size() - 1; i > 0; --i) {
      const size_t j = rng.below(i + 1);
      std::swap(work[i], work[j]);
    }
    used.clear();
    edges.clear();
    bool ok = true;
    for (size_t pos = 0; pos + 1 < work.size(); pos += 2) {
      const int u = work[pos];
      int v = work[pos + 1];
      int budget = kRedrawBudget;
      while ((u == v || used.count(pair_key(u, v)) != 0) && budget-- > 0 &&
             pos + 2 < work.size()) {
        const size_t r = pos + 1 + rng.below(work.size() - (pos + 1));
        std::swap(work[pos + 1], work[r]);
        v = work[pos + 1];
      }
      if (u == v || used.count(pair_key(u, v)) != 0) {
        ok = false;
        break;
      }
      used.insert(pair_key(u, v));
      edges.push_back(make_edge(u, v));
    }
    if (ok) return Graph::from_edge_list(n, std::move(edges));
  }
  std::ostringstream msg;
  msg << "gen_ucm: failed to wire a simple graph for n=" << n
      << " gamma=" << gamma << " k_min=" << k_min << " after " << kRestarts
      << " restarts";
  throw std::runtime_error(msg.str());
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> families = {
      Family::SBM,          Family::ER,          Family::SmallWorld,
      Family::PAShifted,    Family::PASuperlinear, Family::HolmeKim,
      Family::KlemmEguiluz, Family::SpatialSF,   Family::UCM,
  };
  return families;
}

std::string family_name(Family family) {
  switch (family) {
    case Family::SBM: return "sbm";
    case Family::ER: return "er";
    case Family::SmallWorld: return "small-world";
    case Family::PAShifted: return "pa-shifted";
    case Family::PASuperlinear: return "pa-superlinear";
    case Family::HolmeKim: return "holme-kim";
    case Family::KlemmEguiluz: return "klemm-eguiluz";
    case Family::SpatialSF: return "spatial-sf";
    case Family::UCM: return "ucm";
  }
  throw std::logic_error("family_name: unknown family tag");
}

Family family_from_name(const std::string& name) {
  for (Family f : all_families()) {
    if (family_name(f) == name) return f;
  }
  throw std::invalid_argument("unknown graph family: '" + name + "'");
}

const std::vector<std::string>& family_param_keys(Family family) {
  static const std::vector<std::string> sbm = {"m", "p", "q"};
  static const std::vector<std::string> er = {"p"};
  static const std::vector<std::string> sw = {"lattice_degree", "p_add"};
  static const std::vector<std::string> pa = {"links_per_node",
                                              "attractiveness"};
  static const std::vector<std::string> pasl = {"links_per_node", "theta"};
  static const std::vector<std::string> hk = {"links_per_node", "p_triad"};
  static const std::vector<std::string> ke = {"links_per_node", "crossover"};
  static const std::vector<std::string> ssf = {"links_per_node", "r_c"};
  static const std::vector<std::string> ucm = {"k_min", "gamma"};
  switch (family) {
    case Family::SBM: return sbm;
    case Family::ER: return er;
    case Family::SmallWorld: return sw;
    case Family::PAShifted: return pa;
    case Family::PASuperlinear: return pasl;
    case Family::HolmeKim: return hk;
    case Family::KlemmEguiluz: return ke;
    case Family::SpatialSF: return ssf;
    case Family::UCM: return ucm;
  }
  throw std::logic_error("family_param_keys: unknown family tag");
}

namespace {

void range_fail(const GeneratorSpec& spec, const std::string& what) {
  throw std::invalid_argument("generator spec (" + family_name(spec.family) +
                              "): " + what);
}

}  // namespace

double GeneratorSpec::param(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) {
    throw std::out_of_range("generator spec (" + family_name(family) +
                            "): missing parameter '" + key + "'");
  }
  return it->second;
}

int GeneratorSpec::param_int(const std::string& key) const {
  const double v = param(key);
  if (std::floor(v) != v || std::fabs(v) > 1e9) {
    throw std::invalid_argument("generator spec (" + family_name(family) +
                                "): parameter '" + key +
                                "' must be an integer, got " +
                                format_double(v));
  }
  return static_cast<int>(v);
}

void GeneratorSpec::validate() const {
  if (n < 3) range_fail(*this, "n must be >= 3");
  const auto& keys = family_param_keys(family);
  for (const auto& key : keys) param(key);  // presence
  for (const auto& [key, value] : params) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      range_fail(*this, "unknown parameter '" + key + "'");
    }
    (void)value;
  }
  // Published sampling ranges for each family.
  switch (family) {
    case Family::SBM: {
      const int m = param_int("m");
      const double p = param("p");
      const double q = param("q");
      if (m < 2 || m > 5) range_fail(*this, "m must be in {2,...,5}");
      if (!(p >= 0.1 && p <= 1.0)) range_fail(*this, "p must be in [0.1,1]");
      if (!(q >= 0.01 && q <= p)) range_fail(*this, "q must be in [0.01,p]");
      break;
    }
    case Family::ER: {
      const double p = param("p");
      if (!(p >= 0.2 && p <= 1.0)) range_fail(*this, "p must be in [0.2,1]");
      break;
    }
    case Family::SmallWorld: {
      const int ld = param_int("lattice_degree");
      const double p_add = param("p_add");
      if (ld != 4 && ld != 8 && ld != 12) {
        range_fail(*this, "lattice_degree must be one of {4,8,12}");
      }
      if (ld >= n) range_fail(*this, "lattice_degree must be smaller than n");
      if (!(p_add >= 0.0 && p_add <= 0.1)) {
        range_fail(*this, "p_add must be in [0,0.1]");
      }
      break;
    }
    case Family::PAShifted: {
      const int links = param_int("links_per_node");
      const double a = param("attractiveness");
      if (links < 1 || links > 5) {
        range_fail(*this, "links_per_node must be in {1,...,5}");
      }
      if (!(a >= 0.0 && a <= 5.0)) {
        range_fail(*this, "attractiveness must be in [0,5]");
      }
      break;
    }
    case Family::PASuperlinear: {
      const int links = param_int("links_per_node");
      const double theta = param("theta");
      if (links < 1 || links > 4) {
        range_fail(*this, "links_per_node must be in {1,...,4}");
      }
      if (!(theta >= 0.0 && theta <= 3.0)) {
        range_fail(*this, "theta must be in [0,3]");
      }
      break;
    }
    case Family::HolmeKim: {
      const int links = param_int("links_per_node");
      const double p_triad = param("p_triad");
      if (links < 1 || links > 5) {
        range_fail(*this, "links_per_node must be in {1,...,5}");
      }
      if (!(p_triad >= 0.0 && p_triad <= 1.0)) {
        range_fail(*this, "p_triad must be in [0,1]");
      }
      break;
    }
    case Family::KlemmEguiluz: {
      const int links = param_int("links_per_node");
      const double crossover = param("crossover");
      if (links < 1 || links > 5) {
        range_fail(*this, "links_per_node must be in {1,...,5}");
      }
      if (!(crossover >= 0.0 && crossover <= 1.0)) {
        range_fail(*this, "crossover must be in [0,1]");
      }
      break;
    }
    case Family::SpatialSF: {
      const int links = param_int("links_per_node");
      const double r_c = param("r_c");
      if (links < 1 || links > 5) {
        range_fail(*this, "links_per_node must be in {1,...,5}");
      }
      if (!(r_c > 0.0 && r_c <= 0.2)) {
        range_fail(*this, "r_c must be in (0,0.2]");
      }
      break;
    }
    case Family::UCM: {
      const int k_min = param_int("k_min");
      const double gamma = param("gamma");
      if (k_min < 1 || k_min > 5) {
        range_fail(*this, "k_min must be in {1,...,5}");
      }
      if (!(gamma >= 1.0 && gamma <= 4.0)) {
        range_fail(*this, "gamma must be in [1,4]");
      }
      if (k_min > std::floor(std::sqrt(static_cast<double>(n)))) {
        range_fail(*this, "k_min exceeds the structural cutoff sqrt(n)");
      }
      break;
    }
  }
}

Graph generate(const GeneratorSpec& spec) {
  switch (spec.family) {
    case Family::SBM: {
      SbmParams params;
      params.n = spec.n;
      params.m = spec.param_int("m");
      params.p = spec.param("p");
      params.q = spec.param("q");
      return gen_sbm(params, spec.seed);
    }
    case Family::ER:
      return gen_er(spec.n, spec.param("p"), spec.seed);
    case Family::SmallWorld:
      return gen_small_world(spec.n, spec.param_int("lattice_degree"),
                             spec.param("p_add"), spec.seed);
    case Family::PAShifted:
      return gen_pa_shifted(spec.n, spec.param_int("links_per_node"),
                            spec.param("attractiveness"), spec.seed);
    case Family::PASuperlinear:
      return gen_pa_superlinear(spec.n, spec.param_int("links_per_node"),
                                spec.param("theta"), spec.seed);
    case Family::HolmeKim:
      return gen_holme_kim(spec.n, spec.param_int("links_per_node"),
                           spec.param("p_triad"), spec.seed);
    case Family::KlemmEguiluz:
      return gen_klemm_eguiluz(spec.n, spec.param_int("links_per_node"),
                               spec.param("crossover"), spec.seed);
    case Family::SpatialSF:
      return gen_spatial_sf(spec.n, spec.param_int("links_per_node"),
                            spec.param("r_c"), spec.seed);
    case Family::UCM:
      return gen_ucm(spec.n, spec.param("gamma"), spec.param_int("k_min"),
                     spec.seed);
  }
  throw std::logic_error("generate: unknown family tag");
}

Config generator_spec_to_config(const GeneratorSpec& spec) {
  Config cfg;
  cfg.set("family", family_name(spec.family));
  cfg.set_int("n", spec.n);
  cfg.set_u64("seed", spec.seed);
  for (const auto& key : family_param_keys(spec.family)) {
    cfg.set_real(key, spec.param(key));
  }
  return cfg;
}

GeneratorSpec generator_spec_from_config(const Config& cfg) {
  GeneratorSpec spec;
  spec.family = family_from_name(cfg.get_string("family"));
  spec.n = static_cast<int>(cfg.get_int("n"));
  spec.seed = cfg.get_u64("seed", 0);
  const auto& keys = family_param_keys(spec.family);
  for (const auto& key : keys) {
    spec.params[key] = cfg.get_real(key);
  }
  for (const auto& [key, value] : cfg.entries()) {
    (void)value;
    if (key == "family" || key == "n" || key == "seed") continue;
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw std::invalid_argument("unknown generator key '" + key +
                                  "' for family " + family_name(spec.family));
    }
  }
  spec.validate();
  return spec;
}

Graph ensure_connected(const GeneratorSpec& spec, int max_attempts,
                       int* attempts_out) {
  if (max_attempts < 1) {
    throw std::invalid_argument("ensure_connected: max_attempts must be >= 1");
  }
  GeneratorSpec attempt_spec = spec;
  std::vector<int> last_components;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    attempt_spec.seed =
        derive_seed(spec.seed, {static_cast<uint64_t>(attempt)});
    Graph g = generate(attempt_spec);
    if (is_connected(g)) {
      if (attempts_out != nullptr) *attempts_out = attempt + 1;
      return g;
    }
    last_components = component_sizes(g);
  }
  if (attempts_out != nullptr) *attempts_out = max_attempts;
  std::ostringstream msg;
  msg << "ensure_connected: " << family_name(spec.family) << " n=" << spec.n
      << " stayed disconnected after " << max_attempts
      << " attempts (last draw: " << last_components.size()
      << " components, largest " << last_components.front() << ")";
  throw ConnectivityError(msg.str(), std::move(last_components));
}

}  // namespace coopnet
