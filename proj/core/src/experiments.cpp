#include "coopnet/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coopnet/markov_oracle.hpp"
#include "coopnet/meeting_times.hpp"
#include "coopnet/parallel.hpp"
#include "coopnet/rng.hpp"

namespace coopnet {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string sanitize_cell(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

void append_comment_block(std::string& out, const Config& cfg) {
  for (const auto& [key, value] : cfg.entries()) {
    out += "# ";
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i != 0) out += ',';
    out += cells[i];
  }
  out += '\n';
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : text) {
    if (ch == ',') {
      parts.push_back(current);
      current.clear();
    } else if (ch != ' ' && ch != '\t') {
      current += ch;
    }
  }
  parts.push_back(current);
  return parts;
}

long long parse_int_token(const std::string& token, const std::string& key) {
  long long value = 0;
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), last, value);
  if (token.empty() || ec != std::errc() || ptr != last) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" +
                                token + "'");
  }
  return value;
}

double parse_real_token(const std::string& token, const std::string& key) {
  double value = 0.0;
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), last, value);
  if (token.empty() || ec != std::errc() || ptr != last) {
    throw std::invalid_argument("config key '" + key + "': bad real '" +
                                token + "'");
  }
  return value;
}

std::vector<int> get_int_list(const Config& cfg, const std::string& key,
                              const std::vector<int>& fallback) {
  if (!cfg.contains(key)) return fallback;
  std::vector<int> out;
  for (const auto& token : split_list(cfg.get_string(key))) {
    out.push_back(static_cast<int>(parse_int_token(token, key)));
  }
  return out;
}

std::vector<double> get_real_list(const Config& cfg, const std::string& key,
                                  const std::vector<double>& fallback) {
  if (!cfg.contains(key)) return fallback;
  std::vector<double> out;
  for (const auto& token : split_list(cfg.get_string(key))) {
    out.push_back(parse_real_token(token, key));
  }
  return out;
}

std::string join_int_list(const std::vector<int>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::string join_real_list(const std::vector<double>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

void require_keys_known(const Config& cfg,
                        std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : cfg.entries()) {
    (void)value;
    if (key == "experiment" || key == "threads") continue;
    bool ok = false;
    for (std::string_view k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

void require_experiment_match(const Config& cfg, const std::string& name) {
  if (cfg.contains("experiment") && cfg.get_string("experiment") != name) {
    throw std::invalid_argument("config names experiment '" +
                                cfg.get_string("experiment") +
                                "', expected '" + name + "'");
  }
}

/// Ratio of mean-field to exact critical ratio; absent unless both finite.
std::optional<double> ratio_mf_over_exact(const CriticalRatio& mf,
                                          const CriticalRatio& exact) {
  if (mf.pole || exact.pole) return std::nullopt;
  if (!std::isfinite(mf.value) || !std::isfinite(exact.value)) {
    return std::nullopt;
  }
  const double ratio = mf.value / exact.value;
  if (!std::isfinite(ratio)) return std::nullopt;
  return ratio;
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t half = values.size() / 2;
  if (values.size() % 2 == 1) return values[half];
  return 0.5 * (values[half - 1] + values[half]);
}

ordered_json opt_real_json(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

ordered_json config_echo_json(const Config& cfg) {
  ordered_json obj = ordered_json::object();
  for (const auto& [key, value] : cfg.entries()) obj[key] = value;
  return obj;
}

struct ExactOutcome {
  long long edges = 0;
  double mu1 = 0.0;
  CriticalRatio bstar;
};

ExactOutcome exact_critical_ratio(const Graph& g, double tolerance,
                                  long max_sweeps) {
  MeetingTimesOptions options;
  options.tolerance = tolerance;
  options.max_sweeps = max_sweeps;
  const MeetingTimes mt = meeting_times(g, options);
  const CoalescenceSummary summary = remeeting_times(g, mt);
  ExactOutcome out;
  out.edges = g.edge_count();
  out.mu1 = summary.mu1;
  out.bstar = critical_ratio_exact(g, summary);
  return out;
}

/// One (point, replicate) outcome shared by the three parameter sweeps.
/// measured_mf is the mean-field ratio at the realized degree moments of the
/// drawn network, as opposed to the closed form at the generator parameters.
struct SweepCell {
  std::uint64_t seed = 0;
  int resamples = 0;
  bool ok = false;
  std::string error;
  long long edges = 0;
  double mu1 = 0.0;
  CriticalRatio exact;
  CriticalRatio measured_mf;
};

void run_sweep_cell(SweepCell& cell, const GeneratorSpec& spec,
                    int max_attempts, double tolerance, long max_sweeps) {
  int attempts = 0;
  try {
    GeneratorSpec seeded = spec;
    seeded.seed = cell.seed;
    const Graph g = ensure_connected(seeded, max_attempts, &attempts);
    cell.resamples = attempts - 1;
    const ExactOutcome out = exact_critical_ratio(g, tolerance, max_sweeps);
    cell.edges = out.edges;
    cell.mu1 = out.mu1;
    cell.exact = out.bstar;
    cell.measured_mf = critical_ratio_mf(degree_moments(g));
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.resamples = attempts;
    cell.ok = false;
    cell.error = e.what();
  }
}

void push_exact_cells(std::vector<std::string>& cells, const SweepCell& cell,
                      bool reciprocal_form) {
  if (cell.ok) {
    cells.push_back(std::to_string(cell.edges));
    cells.push_back(format_double(cell.mu1));
    cells.push_back(format_double(cell.exact.numerator));
    cells.push_back(format_double(cell.exact.denominator));
    cells.push_back(cell.exact.pole ? "1" : "0");
    cells.push_back(format_double(reciprocal_form ? cell.exact.reciprocal()
                                                  : cell.exact.value));
  } else {
    for (int i = 0; i < 6; ++i) cells.emplace_back();
  }
}

void push_mf_cells(std::vector<std::string>& cells, const CriticalRatio& mf,
                   bool reciprocal_form) {
  cells.push_back(format_double(mf.numerator));
  cells.push_back(format_double(mf.denominator));
  cells.push_back(mf.pole ? "1" : "0");
  cells.push_back(format_double(reciprocal_form ? mf.reciprocal() : mf.value));
}

void push_ratio_cell(std::vector<std::string>& cells, const SweepCell& cell,
                     const CriticalRatio& mf) {
  std::optional<double> ratio;
  if (cell.ok) ratio = ratio_mf_over_exact(mf, cell.exact);
  cells.push_back(ratio ? format_double(*ratio) : std::string());
}

std::string status_cell(const SweepCell& cell) {
  if (cell.ok) return "ok";
  return sanitize_cell("error: " + cell.error);
}

void require_positive_replicates(int replicates) {
  if (replicates < 1) {
    throw std::invalid_argument("replicates must be >= 1");
  }
}

void require_probability(double value, const char* key) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string(key) + " must lie in [0, 1]");
  }
}

/// Sign change of the per-point means: first adjacent pair with opposite
/// signs, reported as the bracketing parameter values.
ordered_json sign_change_json(const std::vector<double>& grid,
                              const std::vector<std::optional<double>>& means,
                              const char* low_key, const char* high_key) {
  for (size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!means[i] || !means[i + 1]) continue;
    if (*means[i] == 0.0 || *means[i + 1] == 0.0) continue;
    if ((*means[i] > 0.0) != (*means[i + 1] > 0.0)) {
      ordered_json bracket;
      bracket[low_key] = grid[i];
      bracket[high_key] = grid[i + 1];
      return bracket;
    }
  }
  return nullptr;
}

}  // namespace

std::vector<int> SweepNConfig::default_n_grid() {
  std::vector<int> grid;
  for (int n = 20; n <= 300; n += 20) grid.push_back(n);
  return grid;
}

SweepNConfig SweepNConfig::from_config(const Config& cfg) {
  require_keys_known(cfg, {"n_grid", "m", "p", "q", "replicates", "seed",
                           "tolerance", "max_sweeps", "max_attempts"});
  require_experiment_match(cfg, "sweep-n");
  SweepNConfig out;
  out.n_grid = get_int_list(cfg, "n_grid", out.n_grid);
  out.m = static_cast<int>(cfg.get_int("m", out.m));
  out.p = cfg.get_real("p", out.p);
  out.q = cfg.get_real("q", out.q);
  out.replicates = static_cast<int>(cfg.get_int("replicates", out.replicates));
  out.seed = cfg.get_u64("seed", out.seed);
  out.threads = static_cast<int>(cfg.get_int("threads", out.threads));
  out.tolerance = cfg.get_real("tolerance", out.tolerance);
  out.max_sweeps = static_cast<long>(cfg.get_int("max_sweeps", out.max_sweeps));
  out.max_attempts =
      static_cast<int>(cfg.get_int("max_attempts", out.max_attempts));
  return out;
}

Config SweepNConfig::to_config() const {
  Config cfg;
  cfg.set("experiment", "sweep-n");
  cfg.set("n_grid", join_int_list(n_grid));
  cfg.set_int("m", m);
  cfg.set_real("p", p);
  cfg.set_real("q", q);
  cfg.set_int("replicates", replicates);
  cfg.set_u64("seed", seed);
  cfg.set_real("tolerance", tolerance);
  cfg.set_int("max_sweeps", max_sweeps);
  cfg.set_int("max_attempts", max_attempts);
  return cfg;
}

ExperimentResult run_sweep_n(const SweepNConfig& cfg) {
  require_positive_replicates(cfg.replicates);
  if (cfg.n_grid.empty()) throw std::invalid_argument("sweep-n: empty n grid");
  require_probability(cfg.p, "p");
  require_probability(cfg.q, "q");
  const long points = static_cast<long>(cfg.n_grid.size());
  const long reps = cfg.replicates;

  std::vector<CriticalRatio> mf(points);
  for (long pi = 0; pi < points; ++pi) {
    SbmParams params;
    params.n = cfg.n_grid[pi];
    params.m = cfg.m;
    params.p = cfg.p;
    params.q = cfg.q;
    params.validate();
    mf[pi] = critical_ratio_sbm(params);
  }

  const std::uint64_t tag = fnv1a64("sweep-n");
  std::vector<SweepCell> cells(points * reps);
  parallel_for(points * reps, cfg.threads, [&](long job) {
    const long pi = job / reps;
    const long ri = job % reps;
    SweepCell& cell = cells[job];
    cell.seed = derive_seed(cfg.seed, {tag, static_cast<std::uint64_t>(pi),
                                       static_cast<std::uint64_t>(ri)});
    GeneratorSpec spec;
    spec.family = Family::SBM;
    spec.n = cfg.n_grid[pi];
    spec.params = {{"m", static_cast<double>(cfg.m)}, {"p", cfg.p},
                   {"q", cfg.q}};
    run_sweep_cell(cell, spec, cfg.max_attempts, cfg.tolerance,
                   cfg.max_sweeps);
  });

  std::string csv;
  const Config echo_cfg = cfg.to_config();
  append_comment_block(csv, echo_cfg);
  append_row(csv,
             {"n", "replicate", "seed", "resamples", "edges", "mu1",
              "exact_numerator", "exact_denominator", "exact_pole",
              "exact_bstar", "mf_numerator", "mf_denominator", "mf_pole",
              "mf_bstar", "ratio", "rel_error", "closed_form_bstar",
              "status"});
  for (long pi = 0; pi < points; ++pi) {
    for (long ri = 0; ri < reps; ++ri) {
      const SweepCell& cell = cells[pi * reps + ri];
      std::vector<std::string> row;
      row.push_back(std::to_string(cfg.n_grid[pi]));
      row.push_back(std::to_string(ri));
      row.push_back(std::to_string(cell.seed));
      row.push_back(std::to_string(cell.resamples));
      push_exact_cells(row, cell, false);
      if (cell.ok) {
        push_mf_cells(row, cell.measured_mf, false);
      } else {
        for (int i = 0; i < 4; ++i) row.emplace_back();
      }
      std::optional<double> ratio;
      if (cell.ok) ratio = ratio_mf_over_exact(cell.measured_mf, cell.exact);
      row.push_back(ratio ? format_double(*ratio) : std::string());
      row.push_back(ratio ? format_double(std::fabs(*ratio - 1.0))
                          : std::string());
      row.push_back(mf[pi].pole ? std::string()
                                : format_double(mf[pi].value));
      row.push_back(status_cell(cell));
      append_row(csv, row);
    }
  }

  ordered_json summary;
  summary["experiment"] = "sweep-n";
  summary["config"] = config_echo_json(echo_cfg);
  ordered_json points_json = ordered_json::array();
  long failures_total = 0;
  for (long pi = 0; pi < points; ++pi) {
    std::vector<double> rel_errors;
    std::vector<double> closed_form_errors;
    long failures = 0;
    long resamples = 0;
    for (long ri = 0; ri < reps; ++ri) {
      const SweepCell& cell = cells[pi * reps + ri];
      resamples += cell.resamples;
      if (!cell.ok) {
        ++failures;
        continue;
      }
      const auto ratio = ratio_mf_over_exact(cell.measured_mf, cell.exact);
      if (ratio) rel_errors.push_back(std::fabs(*ratio - 1.0));
      const auto closed = ratio_mf_over_exact(mf[pi], cell.exact);
      if (closed) closed_form_errors.push_back(std::fabs(*closed - 1.0));
    }
    failures_total += failures;
    ordered_json pj;
    pj["n"] = cfg.n_grid[pi];
    pj["replicates"] = reps;
    pj["failures"] = failures;
    pj["resamples"] = resamples;
    pj["mean_rel_error"] = rel_errors.empty()
                               ? ordered_json(nullptr)
                               : ordered_json(mean_of(rel_errors));
    pj["max_rel_error"] =
        rel_errors.empty()
            ? ordered_json(nullptr)
            : ordered_json(*std::max_element(rel_errors.begin(),
                                             rel_errors.end()));
    pj["closed_form_bstar"] =
        mf[pi].pole ? ordered_json(nullptr) : ordered_json(mf[pi].value);
    pj["mean_rel_error_closed_form"] =
        closed_form_errors.empty()
            ? ordered_json(nullptr)
            : ordered_json(mean_of(closed_form_errors));
    points_json.push_back(pj);
  }
  summary["points"] = points_json;
  summary["failures_total"] = failures_total;

  ExperimentResult result;
  result.csv = std::move(csv);
  result.summary_json = summary.dump(2) + "\n";
  return result;
}

std::vector<double> SweepPErConfig::default_p_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 19; ++k) grid.push_back(k / 20.0);
  return grid;
}

SweepPErConfig SweepPErConfig::from_config(const Config& cfg) {
  require_keys_known(cfg, {"n", "p_grid", "replicates", "seed", "tolerance",
                           "max_sweeps", "max_attempts"});
  require_experiment_match(cfg, "sweep-p-er");
  SweepPErConfig out;
  out.n = static_cast<int>(cfg.get_int("n", out.n));
  out.p_grid = get_real_list(cfg, "p_grid", out.p_grid);
  out.replicates = static_cast<int>(cfg.get_int("replicates", out.replicates));
  out.seed = cfg.get_u64("seed", out.seed);
  out.threads = static_cast<int>(cfg.get_int("threads", out.threads));
  out.tolerance = cfg.get_real("tolerance", out.tolerance);
  out.max_sweeps = static_cast<long>(cfg.get_int("max_sweeps", out.max_sweeps));
  out.max_attempts =
      static_cast<int>(cfg.get_int("max_attempts", out.max_attempts));
  return out;
}

Config SweepPErConfig::to_config() const {
  Config cfg;
  cfg.set("experiment", "sweep-p-er");
  cfg.set_int("n", n);
  cfg.set("p_grid", join_real_list(p_grid));
  cfg.set_int("replicates", replicates);
  cfg.set_u64("seed", seed);
  cfg.set_real("tolerance", tolerance);
  cfg.set_int("max_sweeps", max_sweeps);
  cfg.set_int("max_attempts", max_attempts);
  return cfg;
}

ExperimentResult run_sweep_p_er(const SweepPErConfig& cfg) {
  require_positive_replicates(cfg.replicates);
  if (cfg.p_grid.empty()) {
    throw std::invalid_argument("sweep-p-er: empty p grid");
  }
  if (cfg.n < 3) throw std::invalid_argument("sweep-p-er: n must be >= 3");
  for (double p : cfg.p_grid) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw std::invalid_argument("sweep-p-er: p must lie in (0, 1]");
    }
  }
  const long points = static_cast<long>(cfg.p_grid.size());
  const long reps = cfg.replicates;

  std::vector<CriticalRatio> mf(points);
  for (long pi = 0; pi < points; ++pi) {
    mf[pi] = critical_ratio_er(cfg.n, cfg.p_grid[pi]);
  }

  const std::uint64_t tag = fnv1a64("sweep-p-er");
  std::vector<SweepCell> cells(points * reps);
  parallel_for(points * reps, cfg.threads, [&](long job) {
    const long pi = job / reps;
    const long ri = job % reps;
    SweepCell& cell = cells[job];
    cell.seed = derive_seed(cfg.seed, {tag, static_cast<std::uint64_t>(pi),
                                       static_cast<std::uint64_t>(ri)});
    GeneratorSpec spec;
    spec.family = Family::ER;
    spec.n = cfg.n;
    spec.params = {{"p", cfg.p_grid[pi]}};
    run_sweep_cell(cell, spec, cfg.max_attempts, cfg.tolerance,
                   cfg.max_sweeps);
  });

  std::string csv;
  const Config echo_cfg = cfg.to_config();
  append_comment_block(csv, echo_cfg);
  append_row(csv,
             {"p", "replicate", "seed", "resamples", "edges", "mu1",
              "exact_numerator", "exact_denominator", "exact_pole",
              "exact_inv_bstar", "mf_numerator", "mf_denominator", "mf_pole",
              "mf_inv_bstar", "ratio", "status"});
  for (long pi = 0; pi < points; ++pi) {
    for (long ri = 0; ri < reps; ++ri) {
      const SweepCell& cell = cells[pi * reps + ri];
      std::vector<std::string> row;
      row.push_back(format_double(cfg.p_grid[pi]));
      row.push_back(std::to_string(ri));
      row.push_back(std::to_string(cell.seed));
      row.push_back(std::to_string(cell.resamples));
      push_exact_cells(row, cell, true);
      push_mf_cells(row, mf[pi], true);
      push_ratio_cell(row, cell, mf[pi]);
      row.push_back(status_cell(cell));
      append_row(csv, row);
    }
  }

  ordered_json summary;
  summary["experiment"] = "sweep-p-er";
  summary["config"] = config_echo_json(echo_cfg);
  ordered_json points_json = ordered_json::array();
  std::vector<std::optional<double>> point_means(points);
  long failures_total = 0;
  for (long pi = 0; pi < points; ++pi) {
    std::vector<double> inv_values;
    long failures = 0;
    long resamples = 0;
    for (long ri = 0; ri < reps; ++ri) {
      const SweepCell& cell = cells[pi * reps + ri];
      resamples += cell.resamples;
      if (!cell.ok) {
        ++failures;
        continue;
      }
      inv_values.push_back(cell.exact.reciprocal());
    }
    failures_total += failures;
    if (!inv_values.empty()) point_means[pi] = mean_of(inv_values);
    ordered_json pj;
    pj["p"] = cfg.p_grid[pi];
    pj["replicates"] = reps;
    pj["failures"] = failures;
    pj["resamples"] = resamples;
    pj["mean_exact_inv_bstar"] = opt_real_json(point_means[pi]);
    pj["mf_inv_bstar"] = mf[pi].reciprocal();
    pj["mf_pole"] = mf[pi].pole;
    pj["abs_gap"] = point_means[pi]
                        ? ordered_json(std::fabs(*point_means[pi] -
                                                 mf[pi].reciprocal()))
                        : ordered_json(nullptr);
    points_json.push_back(pj);
  }
  summary["points"] = points_json;
  summary["sign_change"] =
      sign_change_json(cfg.p_grid, point_means, "p_low", "p_high");
  summary["failures_total"] = failures_total;

  ExperimentResult result;
  result.csv = std::move(csv);
  result.summary_json = summary.dump(2) + "\n";
  return result;
}

std::vector<double> SweepQSbmConfig::default_q_grid() {
  std::vector<double> grid;
  for (int j = 0; j < 25; ++j) grid.push_back((5 + 20 * j) / 1000.0);
  return grid;
}

SweepQSbmConfig SweepQSbmConfig::from_config(const Config& cfg) {
  require_keys_known(cfg, {"n", "p", "m_values", "q_grid", "replicates",
                           "seed", "tolerance", "max_sweeps", "max_attempts"});
  require_experiment_match(cfg, "sweep-q-sbm");
  SweepQSbmConfig out;
  out.n = static_cast<int>(cfg.get_int("n", out.n));
  out.p = cfg.get_real("p", out.p);
  out.m_values = get_int_list(cfg, "m_values", out.m_values);
  out.q_grid = get_real_list(cfg, "q_grid", out.q_grid);
  out.replicates = static_cast<int>(cfg.get_int("replicates", out.replicates));
  out.seed = cfg.get_u64("seed", out.seed);
  out.threads = static_cast<int>(cfg.get_int("threads", out.threads));
  out.tolerance = cfg.get_real("tolerance", out.tolerance);
  out.max_sweeps = static_cast<long>(cfg.get_int("max_sweeps", out.max_sweeps));
  out.max_attempts =
      static_cast<int>(cfg.get_int("max_attempts", out.max_attempts));
  return out;
}

Config SweepQSbmConfig::to_config() const {
  Config cfg;
  cfg.set("experiment", "sweep-q-sbm");
  cfg.set_int("n", n);
  cfg.set_real("p", p);
  cfg.set("m_values", join_int_list(m_values));
  cfg.set("q_grid", join_real_list(q_grid));
  cfg.set_int("replicates", replicates);
  cfg.set_u64("seed", seed);
  cfg.set_real("tolerance", tolerance);
  cfg.set_int("max_sweeps", max_sweeps);
  cfg.set_int("max_attempts", max_attempts);
  return cfg;
}

ExperimentResult run_sweep_q_sbm(const SweepQSbmConfig& cfg) {
  require_positive_replicates(cfg.replicates);
  if (cfg.m_values.empty() || cfg.q_grid.empty()) {
    throw std::invalid_argument("sweep-q-sbm: empty m or q grid");
  }
  if (cfg.n < 3) throw std::invalid_argument("sweep-q-sbm: n must be >= 3");
  require_probability(cfg.p, "p");
  for (int m : cfg.m_values) {
    if (m < 2 || m > cfg.n) {
      throw std::invalid_argument(
          "sweep-q-sbm: m must lie in [2, n] (zero-crossing formulas)");
    }
  }
  for (double q : cfg.q_grid) require_probability(q, "q");
  const long m_count = static_cast<long>(cfg.m_values.size());
  const long q_count = static_cast<long>(cfg.q_grid.size());
  const long points = m_count * q_count;
  const long reps = cfg.replicates;

  std::vector<CriticalRatio> mf(points);
  for (long pi = 0; pi < points; ++pi) {
    SbmParams params;
    params.n = cfg.n;
    params.m = cfg.m_values[pi / q_count];
    params.p = cfg.p;
    params.q = cfg.q_grid[pi % q_count];
    params.validate();
    mf[pi] = critical_ratio_sbm(params);
  }
  std::vector<QHat> qhats(m_count);
  std::vector<CriticalRatio> smallq(m_count);
  for (long mi = 0; mi < m_count; ++mi) {
    qhats[mi] = q_hat(cfg.m_values[mi], cfg.p, cfg.n);
    smallq[mi] = bstar_small_q(cfg.n, cfg.m_values[mi], cfg.p);
  }

  const std::uint64_t tag = fnv1a64("sweep-q-sbm");
  std::vector<SweepCell> cells(points * reps);
  parallel_for(points * reps, cfg.threads, [&](long job) {
    const long pi = job / reps;
    const long ri = job % reps;
    SweepCell& cell = cells[job];
    cell.seed = derive_seed(cfg.seed, {tag, static_cast<std::uint64_t>(pi),
                                       static_cast<std::uint64_t>(ri)});
    GeneratorSpec spec;
    spec.family = Family::SBM;
    spec.n = cfg.n;
    spec.params = {{"m", static_cast<double>(cfg.m_values[pi / q_count])},
                   {"p", cfg.p},
                   {"q", cfg.q_grid[pi % q_count]}};
    run_sweep_cell(cell, spec, cfg.max_attempts, cfg.tolerance,
                   cfg.max_sweeps);
  });

  std::string csv;
  const Config echo_cfg = cfg.to_config();
  append_comment_block(csv, echo_cfg);
  append_row(csv, {"m", "q", "replicate", "seed", "resamples", "edges", "mu1",
                   "exact_numerator", "exact_denominator", "exact_pole",
                   "exact_inv_bstar", "mf_numerator", "mf_denominator",
                   "mf_pole", "mf_inv_bstar", "ratio", "qhat_expansion",
                   "qhat_exact_root", "smallq_inv_bstar", "status"});
  for (long pi = 0; pi < points; ++pi) {
    const long mi = pi / q_count;
    for (long ri = 0; ri < reps; ++ri) {
      const SweepCell& cell = cells[pi * reps + ri];
      std::vector<std::string> row;
      row.push_back(std::to_string(cfg.m_values[mi]));
      row.push_back(format_double(cfg.q_grid[pi % q_count]));
      row.push_back(std::to_string(ri));
      row.push_back(std::to_string(cell.seed));
      row.push_back(std::to_string(cell.resamples));
      push_exact_cells(row, cell, true);
      push_mf_cells(row, mf[pi], true);
      push_ratio_cell(row, cell, mf[pi]);
      row.push_back(format_double(qhats[mi].expansion));
      row.push_back(qhats[mi].exact_root
                        ? format_double(*qhats[mi].exact_root)
                        : std::string());
      row.push_back(format_double(smallq[mi].reciprocal()));
      row.push_back(status_cell(cell));
      append_row(csv, row);
    }
  }

  ordered_json summary;
  summary["experiment"] = "sweep-q-sbm";
  summary["config"] = config_echo_json(echo_cfg);
  ordered_json series_json = ordered_json::array();
  long failures_total = 0;
  for (long mi = 0; mi < m_count; ++mi) {
    ordered_json sj;
    sj["m"] = cfg.m_values[mi];
    sj["qhat_expansion"] = qhats[mi].expansion;
    sj["qhat_exact_root"] = qhats[mi].exact_root
                                ? ordered_json(*qhats[mi].exact_root)
                                : ordered_json(nullptr);
    sj["smallq_inv_bstar"] = smallq[mi].reciprocal();
    ordered_json points_json = ordered_json::array();
    std::vector<std::optional<double>> point_means(q_count);
    for (long qi = 0; qi < q_count; ++qi) {
      const long pi = mi * q_count + qi;
      std::vector<double> inv_values;
      long failures = 0;
      long resamples = 0;
      for (long ri = 0; ri < reps; ++ri) {
        const SweepCell& cell = cells[pi * reps + ri];
        resamples += cell.resamples;
        if (!cell.ok) {
          ++failures;
          continue;
        }
        inv_values.push_back(cell.exact.reciprocal());
      }
      failures_total += failures;
      if (!inv_values.empty()) point_means[qi] = mean_of(inv_values);
      ordered_json pj;
      pj["q"] = cfg.q_grid[qi];
      pj["replicates"] = reps;
      pj["failures"] = failures;
      pj["resamples"] = resamples;
      pj["mean_exact_inv_bstar"] = opt_real_json(point_means[qi]);
      pj["mf_inv_bstar"] = mf[pi].reciprocal();
      pj["mf_pole"] = mf[pi].pole;
      points_json.push_back(pj);
    }
    sj["intercept_measured"] = opt_real_json(point_means[0]);
    sj["sign_change"] =
        sign_change_json(cfg.q_grid, point_means, "q_low", "q_high");
    sj["points"] = points_json;
    series_json.push_back(sj);
  }
  summary["series"] = series_json;
  summary["failures_total"] = failures_total;

  ExperimentResult result;
  result.csv = std::move(csv);
  result.summary_json = summary.dump(2) + "\n";
  return result;
}

GeneratorSpec sample_family_spec(Family family, int n_min, int n_max,
                                 Rng& rng) {
  if (n_min < 3 || n_max < n_min) {
    throw std::invalid_argument("sample_family_spec: need 3 <= n_min <= n_max");
  }
  GeneratorSpec spec;
  spec.family = family;
  spec.n = n_min + rng.below_int(n_max - n_min + 1);
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * rng.uniform01();
  };
  switch (family) {
    case Family::SBM: {
      const int m = 2 + rng.below_int(4);
      const double p = uniform(0.1, 1.0);
      const double q = uniform(0.01, p);
      spec.params = {{"m", static_cast<double>(m)}, {"p", p}, {"q", q}};
      break;
    }
    case Family::ER:
      spec.params = {{"p", uniform(0.2, 1.0)}};
      break;
    case Family::SmallWorld: {
      const int lattice_degree = 4 + 4 * rng.below_int(3);
      spec.params = {{"lattice_degree", static_cast<double>(lattice_degree)},
                     {"p_add", uniform(0.0, 0.1)}};
      break;
    }
    case Family::PAShifted:
      spec.params = {
          {"links_per_node", static_cast<double>(1 + rng.below_int(5))},
          {"attractiveness", uniform(0.0, 5.0)}};
      break;
    case Family::PASuperlinear:
      spec.params = {
          {"links_per_node", static_cast<double>(1 + rng.below_int(4))},
          {"theta", uniform(0.0, 3.0)}};
      break;
    case Family::HolmeKim:
      spec.params = {
          {"links_per_node", static_cast<double>(1 + rng.below_int(5))},
          {"p_triad", uniform(0.0, 1.0)}};
      break;
    case Family::KlemmEguiluz:
      spec.params = {
          {"links_per_node", static_cast<double>(1 + rng.below_int(5))},
          {"crossover", uniform(0.0, 1.0)}};
      break;
    case Family::SpatialSF:
      spec.params = {
          {"links_per_node", static_cast<double>(1 + rng.below_int(5))},
          {"r_c", 0.2 * (1.0 - rng.uniform01())}};
      break;
    case Family::UCM:
      spec.params = {{"k_min", static_cast<double>(1 + rng.below_int(5))},
                     {"gamma", uniform(1.0, 4.0)}};
      break;
  }
  spec.seed = rng.next();
  return spec;
}

FamiliesConfig FamiliesConfig::from_config(const Config& cfg) {
  require_keys_known(cfg, {"families", "draws_per_family", "n_min", "n_max",
                           "seed", "tolerance", "max_sweeps", "max_attempts"});
  require_experiment_match(cfg, "families");
  FamiliesConfig out;
  if (cfg.contains("families")) {
    out.families.clear();
    for (const auto& token : split_list(cfg.get_string("families"))) {
      out.families.push_back(family_from_name(token));
    }
  }
  out.draws_per_family =
      static_cast<int>(cfg.get_int("draws_per_family", out.draws_per_family));
  out.n_min = static_cast<int>(cfg.get_int("n_min", out.n_min));
  out.n_max = static_cast<int>(cfg.get_int("n_max", out.n_max));
  out.seed = cfg.get_u64("seed", out.seed);
  out.threads = static_cast<int>(cfg.get_int("threads", out.threads));
  out.tolerance = cfg.get_real("tolerance", out.tolerance);
  out.max_sweeps = static_cast<long>(cfg.get_int("max_sweeps", out.max_sweeps));
  out.max_attempts =
      static_cast<int>(cfg.get_int("max_attempts", out.max_attempts));
  return out;
}

Config FamiliesConfig::to_config() const {
  Config cfg;
  cfg.set("experiment", "families");
  std::string names;
  for (size_t i = 0; i < families.size(); ++i) {
    if (i != 0) names += ',';
    names += family_name(families[i]);
  }
  cfg.set("families", names);
  cfg.set_int("draws_per_family", draws_per_family);
  cfg.set_int("n_min", n_min);
  cfg.set_int("n_max", n_max);
  cfg.set_u64("seed", seed);
  cfg.set_real("tolerance", tolerance);
  cfg.set_int("max_sweeps", max_sweeps);
  cfg.set_int("max_attempts", max_attempts);
  return cfg;
}

namespace {

struct FamilyDrawRecord {
  GeneratorSpec spec;
  std::uint64_t job_seed = 0;
  int resamples = 0;
  bool ok = false;
  std::string error;
  long long edges = 0;
  double mu1 = 0.0;
  CriticalRatio exact;
  CriticalRatio mf;
  std::optional<double> ratio;
};

}  // namespace

ExperimentResult run_families_histogram(const FamiliesConfig& cfg) {
  if (cfg.families.empty()) {
    throw std::invalid_argument("families: empty family list");
  }
  if (cfg.draws_per_family < 1) {
    throw std::invalid_argument("families: draws_per_family must be >= 1");
  }
  if (cfg.n_min < 3 || cfg.n_max < cfg.n_min) {
    throw std::invalid_argument("families: need 3 <= n_min <= n_max");
  }
  const long family_count = static_cast<long>(cfg.families.size());
  const long draws = cfg.draws_per_family;

  const std::uint64_t tag = fnv1a64("families");
  std::vector<FamilyDrawRecord> records(family_count * draws);
  parallel_for(family_count * draws, cfg.threads, [&](long job) {
    const long fi = job / draws;
    const long di = job % draws;
    FamilyDrawRecord& rec = records[job];
    rec.job_seed = derive_seed(cfg.seed, {tag, static_cast<std::uint64_t>(fi),
                                          static_cast<std::uint64_t>(di)});
    Rng rng(rec.job_seed);
    rec.spec = sample_family_spec(cfg.families[fi], cfg.n_min, cfg.n_max, rng);
    int attempts = 0;
    try {
      const Graph g = ensure_connected(rec.spec, cfg.max_attempts, &attempts);
      rec.resamples = attempts - 1;
      rec.mf = critical_ratio_mf(degree_moments(g));
      const ExactOutcome out =
          exact_critical_ratio(g, cfg.tolerance, cfg.max_sweeps);
      rec.edges = out.edges;
      rec.mu1 = out.mu1;
      rec.exact = out.bstar;
      rec.ratio = ratio_mf_over_exact(rec.mf, rec.exact);
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.resamples = attempts;
      rec.ok = false;
      rec.error = e.what();
    }
  });

  std::string csv;
  const Config echo_cfg = cfg.to_config();
  append_comment_block(csv, echo_cfg);
  csv +=
      "# note = desk-scale run; the reference protocol draws 10000 networks "
      "per family\n";
  append_row(csv, {"family", "draw", "n", "seed", "params", "resamples",
                   "edges", "mu1", "exact_numerator", "exact_denominator",
                   "exact_pole", "exact_bstar", "mf_numerator",
                   "mf_denominator", "mf_pole", "mf_bstar", "ratio", "status"});
  for (long fi = 0; fi < family_count; ++fi) {
    for (long di = 0; di < draws; ++di) {
      const FamilyDrawRecord& rec = records[fi * draws + di];
      std::vector<std::string> row;
      row.push_back(family_name(cfg.families[fi]));
      row.push_back(std::to_string(di));
      row.push_back(std::to_string(rec.spec.n));
      row.push_back(std::to_string(rec.spec.seed));
      std::string params;
      for (const auto& key : family_param_keys(rec.spec.family)) {
        if (!params.empty()) params += ';';
        params += key;
        params += '=';
        params += format_double(rec.spec.param(key));
      }
      row.push_back(params);
      row.push_back(std::to_string(rec.resamples));
      if (rec.ok) {
        row.push_back(std::to_string(rec.edges));
        row.push_back(format_double(rec.mu1));
        row.push_back(format_double(rec.exact.numerator));
        row.push_back(format_double(rec.exact.denominator));
        row.push_back(rec.exact.pole ? "1" : "0");
        row.push_back(format_double(rec.exact.value));
        row.push_back(format_double(rec.mf.numerator));
        row.push_back(format_double(rec.mf.denominator));
        row.push_back(rec.mf.pole ? "1" : "0");
        row.push_back(format_double(rec.mf.value));
        row.push_back(rec.ratio ? format_double(*rec.ratio) : std::string());
        row.push_back("ok");
      } else {
        for (int i = 0; i < 11; ++i) row.emplace_back();
        row.push_back(sanitize_cell("error: " + rec.error));
      }
      append_row(csv, row);
    }
  }

  ordered_json summary;
  summary["experiment"] = "families";
  summary["config"] = config_echo_json(echo_cfg);
  ordered_json families_json = ordered_json::array();
  std::vector<double> all_ratios;
  long failures_total = 0;
  long resamples_total = 0;
  const auto mass_in_band = [](const std::vector<double>& ratios) {
    long in_band = 0;
    for (double r : ratios) {
      if (r >= 0.8 && r <= 1.2) ++in_band;
    }
    return static_cast<double>(in_band) / static_cast<double>(ratios.size());
  };
  for (long fi = 0; fi < family_count; ++fi) {
    std::vector<double> ratios;
    long failures = 0;
    for (long di = 0; di < draws; ++di) {
      const FamilyDrawRecord& rec = records[fi * draws + di];
      resamples_total += rec.resamples;
      if (!rec.ok) {
        ++failures;
        continue;
      }
      if (rec.ratio) ratios.push_back(*rec.ratio);
    }
    failures_total += failures;
    all_ratios.insert(all_ratios.end(), ratios.begin(), ratios.end());
    ordered_json fj;
    fj["family"] = family_name(cfg.families[fi]);
    fj["draws"] = draws;
    fj["failures"] = failures;
    fj["ratios_recorded"] = static_cast<long>(ratios.size());
    if (ratios.empty()) {
      fj["median_ratio"] = nullptr;
      fj["min_ratio"] = nullptr;
      fj["max_ratio"] = nullptr;
      fj["mass_in_band"] = nullptr;
    } else {
      fj["median_ratio"] = median_of(ratios);
      fj["min_ratio"] = *std::min_element(ratios.begin(), ratios.end());
      fj["max_ratio"] = *std::max_element(ratios.begin(), ratios.end());
      fj["mass_in_band"] = mass_in_band(ratios);
    }
    families_json.push_back(fj);
  }
  summary["families"] = families_json;
  ordered_json overall;
  overall["ratios_recorded"] = static_cast<long>(all_ratios.size());
  if (all_ratios.empty()) {
    overall["median_ratio"] = nullptr;
    overall["mass_in_band"] = nullptr;
  } else {
    overall["median_ratio"] = median_of(all_ratios);
    overall["mass_in_band"] = mass_in_band(all_ratios);
  }
  summary["overall"] = overall;
  summary["failures_total"] = failures_total;
  summary["resamples_total"] = resamples_total;

  ExperimentResult result;
  result.csv = std::move(csv);
  result.summary_json = summary.dump(2) + "\n";
  return result;
}

namespace {

std::optional<double> try_structure_coefficient(const CriticalRatio& ratio) {
  try {
    const double sigma = structure_coefficient(ratio);
    if (!std::isfinite(sigma)) return std::nullopt;
    return sigma;
  } catch (const std::range_error&) {
    return std::nullopt;
  }
}

}  // namespace

AnalyzeReport analyze_graph(const Graph& g, const AnalyzeOptions& options) {
  if (g.node_count() < 2) {
    throw std::invalid_argument("analyze: need at least 2 nodes");
  }
  if (!is_connected(g)) {
    const std::vector<int> sizes = component_sizes(g);
    std::ostringstream msg;
    msg << "analyze: graph is disconnected (" << sizes.size()
        << " components of sizes ";
    for (size_t i = 0; i < sizes.size() && i < 8; ++i) {
      if (i != 0) msg << ", ";
      msg << sizes[i];
    }
    if (sizes.size() > 8) msg << ", ...";
    msg << ")";
    throw std::invalid_argument(msg.str());
  }
  AnalyzeReport report;
  report.game = options.game;
  report.moments = degree_moments(g);
  report.edges = g.edge_count();
  report.mf_bstar = critical_ratio_mf(report.moments);
  if (g.node_count() <= options.exact_size_cap) {
    MeetingTimesOptions mt_options;
    mt_options.tolerance = options.tolerance;
    mt_options.max_sweeps = options.max_sweeps;
    const MeetingTimes mt = meeting_times(g, mt_options);
    const CoalescenceSummary summary = remeeting_times(g, mt);
    report.exact_bstar = critical_ratio_exact(g, summary);
    report.identity_relative_error = summary.identity_relative_error;
    report.exact_computed = true;
  }
  std::optional<double> sigma;
  if (report.exact_computed) {
    sigma = try_structure_coefficient(report.exact_bstar);
    if (sigma) report.sigma_source = "exact";
  }
  if (!sigma) {
    sigma = try_structure_coefficient(report.mf_bstar);
    if (sigma) report.sigma_source = "mean-field";
  }
  if (!sigma) report.sigma_source = "unavailable";
  report.sigma = sigma;
  if (sigma) {
    report.selection_verdict = selection_condition(options.game, *sigma);
  }
  return report;
}

AnalyzeReport analyze_file(const std::string& path,
                           const AnalyzeOptions& options) {
  return analyze_graph(read_edge_list_file(path), options);
}

SimulateConfig SimulateConfig::from_config(const Config& cfg) {
  SimulateConfig out;
  std::vector<std::string_view> known = {
      "graph_file", "graph_seed", "family", "n",     "b",
      "c",          "R",          "S",      "T",     "P",
      "delta",      "trials",     "placement",       "seed",
      "oracle_size_cap"};
  const bool has_rstp = cfg.contains("R") || cfg.contains("S") ||
                        cfg.contains("T") || cfg.contains("P");
  if (has_rstp) {
    if (!(cfg.contains("R") && cfg.contains("S") && cfg.contains("T") &&
          cfg.contains("P"))) {
      throw std::invalid_argument(
          "simulate: give all four of R, S, T, P or none");
    }
    out.game = GameMatrix{cfg.get_real("R"), cfg.get_real("S"),
                          cfg.get_real("T"), cfg.get_real("P")};
  } else {
    out.game = GameMatrix::donation(cfg.get_real("b", 2.0),
                                    cfg.get_real("c", 1.0));
  }
  out.delta = cfg.get_real("delta", out.delta);
  out.trials = cfg.get_int("trials", out.trials);
  out.seed = cfg.get_u64("seed", out.seed);
  out.oracle_size_cap =
      static_cast<int>(cfg.get_int("oracle_size_cap", out.oracle_size_cap));
  if (cfg.contains("placement")) {
    const std::string text = cfg.get_string("placement");
    if (text == "uniform") {
      out.placement = Placement::uniform_random();
    } else {
      out.placement =
          Placement::fixed_node(static_cast<int>(cfg.get_int("placement")));
    }
  }
  if (cfg.contains("graph_file")) {
    if (cfg.contains("family")) {
      throw std::invalid_argument(
          "simulate: give either graph_file or a generator spec, not both");
    }
    out.graph_file = cfg.get_string("graph_file");
    for (const auto& [key, value] : cfg.entries()) {
      (void)value;
      if (key == "experiment" || key == "threads") continue;
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw std::invalid_argument("unknown config key '" + key + "'");
      }
    }
  } else {
    if (!cfg.contains("family")) {
      throw std::invalid_argument(
          "simulate: need graph_file or generator keys (family, n, ...)");
    }
    const Family family = family_from_name(cfg.get_string("family"));
    for (const auto& key : family_param_keys(family)) {
      known.push_back(key);
    }
    for (const auto& [key, value] : cfg.entries()) {
      (void)value;
      if (key == "experiment" || key == "threads") continue;
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw std::invalid_argument("unknown config key '" + key + "'");
      }
    }
    Config gen_cfg;
    gen_cfg.set("family", cfg.get_string("family"));
    gen_cfg.set_int("n", cfg.get_int("n"));
    gen_cfg.set_u64("seed",
                    cfg.contains("graph_seed")
                        ? cfg.get_u64("graph_seed")
                        : derive_seed(out.seed, {fnv1a64("simulate-graph")}));
    for (const auto& key : family_param_keys(family)) {
      gen_cfg.set_real(key, cfg.get_real(key));
    }
    out.generator = generator_spec_from_config(gen_cfg);
  }
  require_experiment_match(cfg, "simulate");
  return out;
}

Config SimulateConfig::to_config() const {
  Config cfg;
  cfg.set("experiment", "simulate");
  if (graph_file) cfg.set("graph_file", *graph_file);
  if (generator) {
    const Config gen = generator_spec_to_config(*generator);
    for (const auto& [key, value] : gen.entries()) {
      cfg.set(key == "seed" ? "graph_seed" : key, value);
    }
  }
  cfg.set_real("R", game.R);
  cfg.set_real("S", game.S);
  cfg.set_real("T", game.T);
  cfg.set_real("P", game.P);
  cfg.set_real("delta", delta);
  cfg.set_int("trials", trials);
  cfg.set("placement", placement.kind == Placement::Kind::UniformRandom
                           ? "uniform"
                           : std::to_string(placement.node));
  cfg.set_u64("seed", seed);
  cfg.set_int("oracle_size_cap", oracle_size_cap);
  return cfg;
}

SimulateReport run_simulate(const SimulateConfig& cfg) {
  if (cfg.trials < 1) {
    throw std::invalid_argument("simulate: trials must be >= 1");
  }
  if (cfg.oracle_size_cap < 0 || cfg.oracle_size_cap > 14) {
    throw std::invalid_argument(
        "simulate: oracle_size_cap must lie in [0, 14]");
  }
  if (cfg.graph_file.has_value() == cfg.generator.has_value()) {
    throw std::invalid_argument(
        "simulate: exactly one graph source (file or generator) required");
  }
  const Graph g = cfg.graph_file ? read_edge_list_file(*cfg.graph_file)
                                 : ensure_connected(*cfg.generator);
  SimulateReport report;
  report.n = g.node_count();
  report.edges = g.edge_count();
  report.game = cfg.game;
  report.delta = cfg.delta;
  report.summary = estimate_fixation(g, cfg.game, cfg.delta, cfg.trials,
                                     cfg.placement, cfg.seed);
  if (g.node_count() <= cfg.oracle_size_cap) {
    const ChainSolution chain = exact_fixation_markov(g, cfg.game, cfg.delta);
    const double oracle = cfg.placement.kind == Placement::Kind::UniformRandom
                              ? chain.uniform_single_c()
                              : chain.single_c(cfg.placement.node);
    report.oracle_rho = oracle;
    const double gap = std::fabs(report.summary.estimate - oracle);
    if (report.summary.std_error > 0.0) {
      report.gap_in_se = gap / report.summary.std_error;
    } else {
      report.gap_in_se =
          gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    report.flagged = *report.gap_in_se > 4.0;
  }
  return report;
}

}  // namespace coopnet
