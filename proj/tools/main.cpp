// coopnet: generate networks, compute exact and mean-field critical
// benefit-to-cost ratios, run fixation simulations, and produce the batch
// sweep CSVs. All state comes from flags and config files.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coopnet/experiments.hpp"
#include "coopnet/game.hpp"
#include "coopnet/generators.hpp"
#include "coopnet/graph.hpp"
#include "coopnet/meanfield.hpp"
#include "coopnet/meeting_times.hpp"
#include "coopnet/rng.hpp"

using ordered_json = nlohmann::ordered_json;
using namespace coopnet;

namespace {

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

/// Reports go to --out when given, stdout otherwise.
void emit_report(const ordered_json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_text_file(out_path, text);
  }
}

ordered_json ratio_json(const CriticalRatio& ratio) {
  ordered_json j;
  j["numerator"] = ratio.numerator;
  j["denominator"] = ratio.denominator;
  j["pole"] = ratio.pole;
  j["value"] = ratio.pole ? ordered_json(nullptr) : ordered_json(ratio.value);
  j["reciprocal"] = ratio.reciprocal();
  return j;
}

ordered_json game_json(const GameMatrix& game) {
  ordered_json j;
  j["R"] = game.R;
  j["S"] = game.S;
  j["T"] = game.T;
  j["P"] = game.P;
  return j;
}

/// Flags shared by every subcommand that can draw a graph from a family.
struct GeneratorFlags {
  std::string config_path;
  std::string family;
  int n = 0;
  std::vector<std::string> params;  // key=value
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "generator spec config (family, n, seed, params)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--family", family, "family name (er, sbm, ...)");
    cmd->add_option("--n", n, "node count");
    cmd->add_option("--param", params,
                    "family parameter as key=value, repeatable");
    cmd->add_option("--seed", seed, "generator seed");
  }

  bool any_given() const {
    return !config_path.empty() || !family.empty() || n > 0 ||
           !params.empty() || seed.has_value();
  }

  GeneratorSpec to_spec() const {
    Config cfg;
    if (!config_path.empty()) cfg = Config::from_file(config_path);
    if (!family.empty()) cfg.set("family", family);
    if (n > 0) cfg.set_int("n", n);
    for (const auto& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw std::runtime_error("--param expects key=value, got '" + kv +
                                 "'");
      }
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.set_u64("seed", *seed);
    if (!cfg.contains("seed")) cfg.set_u64("seed", 1);
    return generator_spec_from_config(cfg);
  }
};

struct GameFlags {
  double b = 2.0;
  double c = 1.0;
  std::optional<double> R, S, T, P;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--b", b, "donation benefit")->capture_default_str();
    cmd->add_option("--c", c, "donation cost")->capture_default_str();
    cmd->add_option("--R", R, "payoff R (needs S, T, P too)");
    cmd->add_option("--S", S, "payoff S");
    cmd->add_option("--T", T, "payoff T");
    cmd->add_option("--P", P, "payoff P");
  }

  GameMatrix to_game() const {
    const int given = int(R.has_value()) + int(S.has_value()) +
                      int(T.has_value()) + int(P.has_value());
    if (given == 4) return {*R, *S, *T, *P};
    if (given != 0) {
      throw std::runtime_error("give all four of --R --S --T --P or none");
    }
    return GameMatrix::donation(b, c);
  }
};

// ---- generate ----------------------------------------------------------

struct GenerateArgs {
  GeneratorFlags gen;
  std::string out_path;
  bool allow_disconnected = false;
  int attempts = 100;
};

void run_generate(const GenerateArgs& args) {
  const GeneratorSpec spec = args.gen.to_spec();
  int attempts_used = 1;
  const Graph g = args.allow_disconnected
                      ? generate(spec)
                      : ensure_connected(spec, args.attempts, &attempts_used);
  write_edge_list_file(g, args.out_path);

  ordered_json j;
  j["family"] = family_name(spec.family);
  j["n"] = g.node_count();
  j["edges"] = g.edge_count();
  j["seed"] = spec.seed;
  j["connected"] = is_connected(g);
  j["attempts"] = attempts_used;
  j["out"] = args.out_path;
  std::fputs((j.dump(2) + "\n").c_str(), stdout);
}

// ---- analyze ------------------------------------------------------------

struct AnalyzeArgs {
  std::string in_path;
  GameFlags game;
  AnalyzeOptions options;
  std::string out_path;
};

void run_analyze(const AnalyzeArgs& args) {
  AnalyzeOptions options = args.options;
  options.game = args.game.to_game();
  const AnalyzeReport report = analyze_file(args.in_path, options);

  ordered_json j;
  j["n"] = report.moments.n;
  j["edges"] = report.edges;
  j["mu1"] = report.moments.mu1;
  j["mu2"] = report.moments.mu2;
  j["mean_field_bstar"] = ratio_json(report.mf_bstar);
  j["exact_computed"] = report.exact_computed;
  if (report.exact_computed) {
    j["exact_bstar"] = ratio_json(report.exact_bstar);
    j["identity_relative_error"] = report.identity_relative_error;
  } else {
    j["exact_bstar"] = nullptr;
    j["identity_relative_error"] = nullptr;
  }
  j["sigma"] = report.sigma ? ordered_json(*report.sigma)
                            : ordered_json(nullptr);
  j["sigma_source"] = report.sigma_source;
  j["game"] = game_json(report.game);
  j["selection_favors_cooperation"] =
      report.selection_verdict ? ordered_json(*report.selection_verdict)
                               : ordered_json(nullptr);
  emit_report(j, args.out_path);
}

// ---- exact --------------------------------------------------------------

struct ExactArgs {
  std::string in_path;
  GeneratorFlags gen;
  std::string method = "auto";
  double tolerance = 1e-10;
  long max_sweeps = 100000;
  std::string save_times_path;
  std::string out_path;
};

Graph load_graph(const std::string& in_path, const GeneratorFlags& gen) {
  if (!in_path.empty() && gen.any_given()) {
    throw std::runtime_error("give either --in or generator flags, not both");
  }
  if (!in_path.empty()) return read_edge_list_file(in_path);
  if (gen.any_given()) return ensure_connected(gen.to_spec());
  throw std::runtime_error("need --in FILE or generator flags");
}

void run_exact(const ExactArgs& args) {
  static const std::map<std::string, MeetingTimesOptions::Method> methods = {
      {"auto", MeetingTimesOptions::Method::Auto},
      {"direct", MeetingTimesOptions::Method::Direct},
      {"cg", MeetingTimesOptions::Method::ConjugateGradient},
      {"gauss-seidel", MeetingTimesOptions::Method::GaussSeidel},
  };
  const Graph g = load_graph(args.in_path, args.gen);
  MeetingTimesOptions options;
  options.method = methods.at(args.method);
  options.tolerance = args.tolerance;
  options.max_sweeps = args.max_sweeps;

  const MeetingTimes mt = meeting_times(g, options);
  const CoalescenceSummary cs = remeeting_times(g, mt);
  const CriticalRatio ratio = critical_ratio_exact(g, cs);
  if (!args.save_times_path.empty()) {
    write_meeting_times_file(mt, args.save_times_path);
  }

  ordered_json j;
  j["n"] = g.node_count();
  j["edges"] = g.edge_count();
  j["mu1"] = cs.mu1;
  ordered_json solver;
  solver["method"] = args.method;
  solver["tolerance"] = mt.tolerance;
  solver["residual"] = mt.solver_residual;
  solver["iterations"] = mt.iterations;
  j["solver"] = solver;
  j["identity_relative_error"] = cs.identity_relative_error;
  j["bstar"] = ratio_json(ratio);
  const bool sigma_defined = !ratio.pole && ratio.value != 1.0;
  j["sigma"] = sigma_defined ? ordered_json(structure_coefficient(ratio))
                             : ordered_json(nullptr);
  emit_report(j, args.out_path);
}

// ---- meanfield ----------------------------------------------------------

struct MeanFieldArgs {
  std::string in_path;
  std::vector<double> er;   // n p
  std::vector<double> sbm;  // n m p q
  double b = 2.0;
  double c = 1.0;
  double delta = 0.01;
  std::string out_path;
};

void run_meanfield(const MeanFieldArgs& args) {
  const int sources = int(!args.in_path.empty()) + int(!args.er.empty()) +
                      int(!args.sbm.empty());
  if (sources != 1) {
    throw std::runtime_error("give exactly one of --in, --er, --sbm");
  }

  ordered_json j;
  if (!args.in_path.empty()) {
    const Graph g = read_edge_list_file(args.in_path);
    const DegreeMoments moments = degree_moments(g);
    const MeanFieldReport report =
        mean_field_report(moments, args.b, args.c, args.delta);
    j["source"] = "graph file";
    j["n"] = moments.n;
    j["mu1"] = moments.mu1;
    j["mu2"] = moments.mu2;
    j["tau"] = report.tau_mf;
    j["bstar"] = ratio_json(report.bstar_mf);
    j["sigma"] = std::isnan(report.sigma_mf) ? ordered_json(nullptr)
                                             : ordered_json(report.sigma_mf);
    j["rho"] = report.rho_mf;
    j["game_b"] = args.b;
    j["game_c"] = args.c;
    j["delta"] = args.delta;
  } else if (!args.er.empty()) {
    const int n = static_cast<int>(args.er[0]);
    const double p = args.er[1];
    j["source"] = "closed form";
    j["family"] = "er";
    j["n"] = n;
    j["p"] = p;
    j["bstar"] = ratio_json(critical_ratio_er(n, p));
  } else {
    SbmParams params;
    params.n = static_cast<int>(args.sbm[0]);
    params.m = static_cast<int>(args.sbm[1]);
    params.p = args.sbm[2];
    params.q = args.sbm[3];
    params.validate();
    const DegreeMoments moments = sbm_moments(params);
    const QHat qhat = q_hat(params.m, params.p, params.n);
    const CriticalRatio smallq =
        bstar_small_q(params.n, params.m, params.p);
    j["source"] = "closed form";
    j["family"] = "sbm";
    j["n"] = params.n;
    j["m"] = params.m;
    j["p"] = params.p;
    j["q"] = params.q;
    j["mu1"] = moments.mu1;
    j["mu2"] = moments.mu2;
    j["bstar"] = ratio_json(critical_ratio_sbm(params));
    j["qhat_expansion"] = qhat.expansion;
    j["qhat_exact_root"] = qhat.exact_root ? ordered_json(*qhat.exact_root)
                                           : ordered_json(nullptr);
    j["smallq_bstar"] = ratio_json(smallq);
  }
  emit_report(j, args.out_path);
}

// ---- simulate -----------------------------------------------------------

struct SimulateArgs {
  std::string config_path;
  std::string in_path;
  GeneratorFlags gen;  // config_path unused here
  GameFlags game;
  std::optional<double> delta;
  std::optional<long long> trials;
  std::string placement;
  std::optional<std::uint64_t> seed;
  std::optional<int> oracle_cap;
  std::string out_path;
};

void run_simulate_cmd(const SimulateArgs& args) {
  Config cfg;
  if (!args.config_path.empty()) cfg = Config::from_file(args.config_path);
  if (!args.in_path.empty()) cfg.set("graph_file", args.in_path);
  if (!args.gen.family.empty()) cfg.set("family", args.gen.family);
  if (args.gen.n > 0) cfg.set_int("n", args.gen.n);
  for (const auto& kv : args.gen.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::runtime_error("--param expects key=value, got '" + kv + "'");
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.gen.seed) cfg.set_u64("graph_seed", *args.gen.seed);
  const int rstp = int(args.game.R.has_value()) + int(args.game.S.has_value()) +
                   int(args.game.T.has_value()) + int(args.game.P.has_value());
  if (rstp == 4) {
    cfg.set_real("R", *args.game.R);
    cfg.set_real("S", *args.game.S);
    cfg.set_real("T", *args.game.T);
    cfg.set_real("P", *args.game.P);
  } else if (rstp != 0) {
    throw std::runtime_error("give all four of --R --S --T --P or none");
  } else if (!cfg.contains("R")) {
    cfg.set_real("b", args.game.b);
    cfg.set_real("c", args.game.c);
  }
  if (args.delta) cfg.set_real("delta", *args.delta);
  if (args.trials) cfg.set_int("trials", *args.trials);
  if (!args.placement.empty()) cfg.set("placement", args.placement);
  if (args.seed) cfg.set_u64("seed", *args.seed);
  if (args.oracle_cap) cfg.set_int("oracle_size_cap", *args.oracle_cap);

  const SimulateConfig sim_cfg = SimulateConfig::from_config(cfg);
  const SimulateReport report = run_simulate(sim_cfg);

  ordered_json j;
  j["n"] = report.n;
  j["edges"] = report.edges;
  j["game"] = game_json(report.game);
  j["delta"] = report.delta;
  j["trials"] = report.summary.trials;
  j["fixations_c"] = report.summary.fixations_c;
  j["estimate"] = report.summary.estimate;
  j["std_error"] = report.summary.std_error;
  j["oracle_rho"] = report.oracle_rho ? ordered_json(*report.oracle_rho)
                                      : ordered_json(nullptr);
  j["gap_in_se"] = report.gap_in_se ? ordered_json(*report.gap_in_se)
                                    : ordered_json(nullptr);
  j["flagged"] = report.flagged;
  emit_report(j, args.out_path);
}

// ---- batch sweeps -------------------------------------------------------

struct BatchArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<int> threads;
  std::string out_path;
};

void add_batch_flags(CLI::App* cmd, BatchArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "master seed override");
  cmd->add_option("--replicates", args.replicates,
                  "replicates (draws per family for 'families') override");
  cmd->add_option("--threads", args.threads, "worker count override");
  cmd->add_option("--out", args.out_path, "CSV output path")->required();
}

/// Loads the config file, applies flag overrides, runs the experiment, and
/// writes CSV to --out and the JSON summary to --out + ".summary.json".
template <typename ConfigT>
void run_batch(const BatchArgs& args, const char* replicates_key,
               ExperimentResult (*runner)(const ConfigT&)) {
  Config cfg;
  if (!args.config_path.empty()) cfg = Config::from_file(args.config_path);
  if (args.seed) cfg.set_u64("seed", *args.seed);
  if (args.replicates) cfg.set_int(replicates_key, *args.replicates);
  if (args.threads) cfg.set_int("threads", *args.threads);

  const ExperimentResult result = runner(ConfigT::from_config(cfg));
  const std::string summary_path = args.out_path + ".summary.json";
  write_text_file(args.out_path, result.csv);
  write_text_file(summary_path, result.summary_json + "\n");
  std::printf("wrote %s and %s\n", args.out_path.c_str(),
              summary_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Exact and mean-field critical benefit-to-cost ratios for the "
      "evolution of cooperation on networks"};
  app.require_subcommand(1);

  GenerateArgs generate_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "generate", "draw a network and write an edge-list file");
    generate_args.gen.add_to(cmd);
    cmd->add_option("--out", generate_args.out_path, "edge-list output path")
        ->required();
    cmd->add_flag("--allow-disconnected", generate_args.allow_disconnected,
                  "write the raw draw without the connectivity retry loop");
    cmd->add_option("--attempts", generate_args.attempts,
                    "max connectivity retries")
        ->capture_default_str();
    cmd->callback([&]() { run_generate(generate_args); });
  }

  AnalyzeArgs analyze_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "analyze", "report moments, critical ratios, and the selection "
                   "verdict for an edge-list file");
    cmd->add_option("--in", analyze_args.in_path, "edge-list input path")
        ->required()
        ->check(CLI::ExistingFile);
    analyze_args.game.add_to(cmd);
    cmd->add_option("--size-cap", analyze_args.options.exact_size_cap,
                    "largest n for the exact computation")
        ->capture_default_str();
    cmd->add_option("--tolerance", analyze_args.options.tolerance,
                    "exact solver residual target")
        ->capture_default_str();
    cmd->add_option("--out", analyze_args.out_path,
                    "JSON report path (stdout when omitted)");
    cmd->callback([&]() { run_analyze(analyze_args); });
  }

  ExactArgs exact_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "exact", "solve meeting times and the exact critical ratio");
    cmd->add_option("--in", exact_args.in_path, "edge-list input path")
        ->check(CLI::ExistingFile);
    exact_args.gen.add_to(cmd);
    cmd->add_option("--method", exact_args.method,
                    "auto | direct | cg | gauss-seidel")
        ->check(CLI::IsMember({"auto", "direct", "cg", "gauss-seidel"}))
        ->capture_default_str();
    cmd->add_option("--tolerance", exact_args.tolerance,
                    "max recurrence residual")
        ->capture_default_str();
    cmd->add_option("--max-sweeps", exact_args.max_sweeps,
                    "iteration budget")
        ->capture_default_str();
    cmd->add_option("--save-times", exact_args.save_times_path,
                    "write the meeting-time table to this file");
    cmd->add_option("--out", exact_args.out_path,
                    "JSON report path (stdout when omitted)");
    cmd->callback([&]() { run_exact(exact_args); });
  }

  MeanFieldArgs meanfield_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "meanfield", "mean-field critical ratio from a graph file or from "
                     "closed forms");
    cmd->add_option("--in", meanfield_args.in_path,
                    "edge-list input path (uses measured moments)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--er", meanfield_args.er, "closed form: N P")
        ->expected(2);
    cmd->add_option("--sbm", meanfield_args.sbm, "closed form: N M P Q")
        ->expected(4);
    cmd->add_option("--b", meanfield_args.b, "donation benefit")
        ->capture_default_str();
    cmd->add_option("--c", meanfield_args.c, "donation cost")
        ->capture_default_str();
    cmd->add_option("--delta", meanfield_args.delta, "selection strength")
        ->capture_default_str();
    cmd->add_option("--out", meanfield_args.out_path,
                    "JSON report path (stdout when omitted)");
    cmd->callback([&]() { run_meanfield(meanfield_args); });
  }

  SimulateArgs simulate_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "simulate", "Monte Carlo fixation estimate, with an enumeration "
                    "cross-check on small graphs");
    cmd->add_option("--config", simulate_args.config_path,
                    "simulation config file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--in", simulate_args.in_path, "edge-list input path");
    cmd->add_option("--family", simulate_args.gen.family,
                    "generator family name");
    cmd->add_option("--n", simulate_args.gen.n, "node count");
    cmd->add_option("--param", simulate_args.gen.params,
                    "family parameter as key=value, repeatable");
    cmd->add_option("--graph-seed", simulate_args.gen.seed, "generator seed");
    simulate_args.game.add_to(cmd);
    cmd->add_option("--delta", simulate_args.delta, "selection strength");
    cmd->add_option("--trials", simulate_args.trials, "trial count");
    cmd->add_option("--placement", simulate_args.placement,
                    "'uniform' or a node index");
    cmd->add_option("--seed", simulate_args.seed, "simulation master seed");
    cmd->add_option("--oracle-cap", simulate_args.oracle_cap,
                    "largest n for the enumeration cross-check");
    cmd->add_option("--out", simulate_args.out_path,
                    "JSON report path (stdout when omitted)");
    cmd->callback([&]() { run_simulate_cmd(simulate_args); });
  }

  BatchArgs sweep_n_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "sweep-n", "critical ratio vs network size on block models");
    add_batch_flags(cmd, sweep_n_args);
    cmd->callback([&]() {
      run_batch<SweepNConfig>(sweep_n_args, "replicates", run_sweep_n);
    });
  }

  BatchArgs sweep_p_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "sweep-p-er", "reciprocal critical ratio vs density on G(n, p)");
    add_batch_flags(cmd, sweep_p_args);
    cmd->callback([&]() {
      run_batch<SweepPErConfig>(sweep_p_args, "replicates", run_sweep_p_er);
    });
  }

  BatchArgs sweep_q_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "sweep-q-sbm", "reciprocal critical ratio vs cross-block density");
    add_batch_flags(cmd, sweep_q_args);
    cmd->callback([&]() {
      run_batch<SweepQSbmConfig>(sweep_q_args, "replicates", run_sweep_q_sbm);
    });
  }

  BatchArgs families_args;
  {
    CLI::App* cmd = app.add_subcommand(
        "families", "mean-field accuracy census across generator families");
    add_batch_flags(cmd, families_args);
    cmd->callback([&]() {
      run_batch<FamiliesConfig>(families_args, "draws_per_family",
                                run_families_histogram);
    });
  }

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
