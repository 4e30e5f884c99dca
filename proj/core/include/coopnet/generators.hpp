#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coopnet/config.hpp"
#include "coopnet/graph.hpp"
#include "coopnet/sbm_params.hpp"

namespace coopnet {

/// Stochastic block model: node i belongs to group i mod m; intra-group
/// pairs linked with probability p, inter-group with probability q.
Graph gen_sbm(const SbmParams& params, uint64_t seed);

/// Erdos-Renyi: every pair linked independently with probability p.
Graph gen_er(int n, double p, uint64_t seed);

/// Ring lattice (lattice_degree/2 neighbors on each side) plus independently
/// added shortcuts; the per-pair probability is scaled so the expected
/// shortcut count is p_add * n * lattice_degree / 2. No rewiring, so the
/// lattice backbone stays connected.
Graph gen_small_world(int n, int lattice_degree, double p_add, uint64_t seed);

/// Growing network: clique seed on links_per_node+1 nodes, then each arrival
/// attaches to links_per_node distinct existing nodes with probability
/// proportional to degree + attractiveness.
Graph gen_pa_shifted(int n, int links_per_node, double attractiveness,
                     uint64_t seed);

/// As gen_pa_shifted but with attachment kernel k^theta (k=0 counts as 1).
Graph gen_pa_superlinear(int n, int links_per_node, double theta,
                         uint64_t seed);

/// Preferential attachment with triad formation: after each preferential
/// step, with probability p_triad the next link of the same arrival closes a
/// triangle with a random neighbor of the previously chosen target, falling
/// back to a preferential step when no eligible neighbor exists.
Graph gen_holme_kim(int n, int links_per_node, double p_triad, uint64_t seed);

/// Active-node growth: each arrival links to every active node, except that
/// each link is redirected with probability `crossover` to a node chosen
/// preferentially from the whole graph; the arrival activates and one old
/// active node deactivates with probability proportional to 1/degree.
Graph gen_klemm_eguiluz(int n, int links_per_node, double crossover,
                        uint64_t seed);

/// Spatial growth on the unit square: arrivals attach with probability
/// proportional to k * exp(-d / r_c), d the Euclidean distance. Node
/// positions are returned through positions_out when non-null.
Graph gen_spatial_sf(int n, int links_per_node, double r_c, uint64_t seed,
                     std::vector<std::pair<double, double>>* positions_out =
                         nullptr);

/// Uncorrelated configuration model: degrees drawn from P(k) proportional to
/// k^-gamma on [k_min, floor(sqrt(n))], total forced even, stubs wired
/// uniformly with self-loops/duplicates redrawn (bounded retries, then a
/// full rewiring restart; bounded restarts, then an error).
Graph gen_ucm(int n, double gamma, int k_min, uint64_t seed);

enum class Family {
  SBM,
  ER,
  SmallWorld,
  PAShifted,
  PASuperlinear,
  HolmeKim,
  KlemmEguiluz,
  SpatialSF,
  UCM,
};

const std::vector<Family>& all_families();
std::string family_name(Family family);
Family family_from_name(const std::string& name);

/// Canonical parameter keys of a family, in serialization order.
const std::vector<std::string>& family_param_keys(Family family);

/// One family draw: family tag, node count, seed, and the family-specific
/// parameters under their canonical keys (e.g. "p", "q", "m" for SBM).
/// validate() enforces the published per-family parameter ranges; the gen_*
/// functions themselves only check mathematical preconditions.
struct GeneratorSpec {
  Family family = Family::ER;
  int n = 0;
  uint64_t seed = 0;
  std::map<std::string, double> params;

  void validate() const;
  double param(const std::string& key) const;
  int param_int(const std::string& key) const;
};

/// Draw a graph from the family described by the spec. Only mathematical
/// preconditions are checked here; published ranges are enforced when a spec
/// is parsed from a config (see generator_spec_from_config).
Graph generate(const GeneratorSpec& spec);

/// Flat key-value round trip (keys: family, n, seed, plus the family's
/// parameter keys).
Config generator_spec_to_config(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_config(const Config& cfg);

/// Raised when ensure_connected exhausts its attempts; carries the component
/// sizes of the last draw.
class ConnectivityError : public std::runtime_error {
 public:
  ConnectivityError(const std::string& what, std::vector<int> sizes)
      : std::runtime_error(what), component_sizes_(std::move(sizes)) {}
  const std::vector<int>& component_sizes() const { return component_sizes_; }

 private:
  std::vector<int> component_sizes_;
};

/// Redraw from the family until connected, each attempt under the sub-seed
/// derived from (spec.seed, attempt index). When attempts_out is non-null it
/// receives the number of draws consumed.
Graph ensure_connected(const GeneratorSpec& spec, int max_attempts = 100,
                       int* attempts_out = nullptr);

}  // namespace coopnet
