#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coopnet/config.hpp"
#include "coopnet/critical_ratio.hpp"
#include "coopnet/game.hpp"
#include "coopnet/generators.hpp"
#include "coopnet/graph.hpp"
#include "coopnet/meanfield.hpp"
#include "coopnet/simulate.hpp"

namespace coopnet {

/// Output of a batch experiment: a CSV table (config echoed as '#' comment
/// lines, one row per graph instance) and a JSON summary string.
struct ExperimentResult {
  std::string csv;
  std::string summary_json;
};

/// Critical ratio versus network size on stochastic block models with fixed
/// (m, p, q). Per replicate the exact value is compared against the
/// mean-field ratio at the realized degree moments (rel_error column); the
/// closed form at the generator parameters is emitted alongside for
/// reference (closed_form_bstar column). The realized-moment comparison is
/// the one that tightens with n; the parameter-level one also carries the
/// sampling fluctuation of the moments themselves.
struct SweepNConfig {
  std::vector<int> n_grid = default_n_grid();
  int m = 3;
  double p = 0.7;
  double q = 0.1;
  int replicates = 20;
  std::uint64_t seed = 1;
  int threads = 1;
  double tolerance = 1e-10;
  long max_sweeps = 100000;
  int max_attempts = 100;

  static std::vector<int> default_n_grid();
  static SweepNConfig from_config(const Config& cfg);
  Config to_config() const;
};
ExperimentResult run_sweep_n(const SweepNConfig& cfg);

/// Reciprocal critical ratio versus edge probability on Erdos-Renyi graphs
/// of fixed size, tracking the sign change at the dense-graph pole.
struct SweepPErConfig {
  int n = 100;
  std::vector<double> p_grid = default_p_grid();
  int replicates = 20;
  std::uint64_t seed = 1;
  int threads = 1;
  double tolerance = 1e-10;
  long max_sweeps = 100000;
  int max_attempts = 100;

  static std::vector<double> default_p_grid();
  static SweepPErConfig from_config(const Config& cfg);
  Config to_config() const;
};
ExperimentResult run_sweep_p_er(const SweepPErConfig& cfg);

/// Reciprocal critical ratio versus between-block probability q on stochastic
/// block models of fixed size and within-block probability p, for each block
/// count in m_values. Rows carry the predicted zero crossing and the small-q
/// reference value alongside the measurements.
struct SweepQSbmConfig {
  int n = 100;
  double p = 0.8;
  std::vector<int> m_values = {2, 4};
  std::vector<double> q_grid = default_q_grid();
  int replicates = 20;
  std::uint64_t seed = 1;
  int threads = 1;
  double tolerance = 1e-10;
  long max_sweeps = 100000;
  int max_attempts = 100;

  static std::vector<double> default_q_grid();
  static SweepQSbmConfig from_config(const Config& cfg);
  Config to_config() const;
};
ExperimentResult run_sweep_q_sbm(const SweepQSbmConfig& cfg);

/// Mean-field accuracy census: draws graphs from every generator family with
/// parameters sampled uniformly from each family's standard ranges and
/// records the ratio of mean-field to exact critical ratio.
struct FamiliesConfig {
  std::vector<Family> families = all_families();
  int draws_per_family = 50;
  int n_min = 100;
  int n_max = 500;
  std::uint64_t seed = 1;
  int threads = 1;
  double tolerance = 1e-10;
  long max_sweeps = 100000;
  int max_attempts = 100;

  static FamiliesConfig from_config(const Config& cfg);
  Config to_config() const;
};
ExperimentResult run_families_histogram(const FamiliesConfig& cfg);

/// Samples one parameter set for `family` from its standard ranges using
/// `rng`, with node count drawn uniformly from [n_min, n_max]. The spec seed
/// is drawn from `rng` as well.
GeneratorSpec sample_family_spec(Family family, int n_min, int n_max, Rng& rng);

/// Single-graph report: degree moments, exact critical ratio when the graph
/// is small enough, mean-field critical ratio, structure coefficient, and the
/// selection verdict for the configured game.
struct AnalyzeOptions {
  GameMatrix game = GameMatrix::donation(2.0, 1.0);
  int exact_size_cap = 2000;
  double tolerance = 1e-10;
  long max_sweeps = 100000;
};
struct AnalyzeReport {
  DegreeMoments moments;
  long long edges = 0;
  CriticalRatio mf_bstar;
  bool exact_computed = false;
  CriticalRatio exact_bstar;
  double identity_relative_error = 0.0;
  std::optional<double> sigma;
  std::string sigma_source;  // "exact", "mean-field", or "unavailable"
  GameMatrix game;
  std::optional<bool> selection_verdict;
};
AnalyzeReport analyze_graph(const Graph& g, const AnalyzeOptions& options);
AnalyzeReport analyze_file(const std::string& path,
                           const AnalyzeOptions& options);

/// Monte Carlo fixation estimate with an exhaustive-enumeration cross-check
/// on small graphs.
struct SimulateConfig {
  std::optional<std::string> graph_file;
  std::optional<GeneratorSpec> generator;
  GameMatrix game = GameMatrix::donation(2.0, 1.0);
  double delta = 0.01;
  long long trials = 100000;
  Placement placement = Placement::uniform_random();
  std::uint64_t seed = 1;
  int oracle_size_cap = 14;

  static SimulateConfig from_config(const Config& cfg);
  Config to_config() const;
};
struct SimulateReport {
  int n = 0;
  long long edges = 0;
  GameMatrix game;
  double delta = 0.0;
  TrialSummary summary;
  std::optional<double> oracle_rho;
  std::optional<double> gap_in_se;
  bool flagged = false;
};
SimulateReport run_simulate(const SimulateConfig& cfg);

}  // namespace coopnet
