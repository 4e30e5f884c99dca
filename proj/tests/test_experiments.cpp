#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopnet/experiments.hpp"

using namespace coopnet;
using nlohmann::json;

namespace {

Graph k4() {
  return Graph::from_edge_list(4, {{0, 1}, {0, 2}, {0, 3},
                                   {1, 2}, {1, 3}, {2, 3}});
}

Graph ring20() {
  std::vector<Graph::Edge> edges;
  for (int u = 0; u < 20; ++u) {
    edges.push_back({u, (u + 1) % 20});
    edges.push_back({u, (u + 2) % 20});
  }
  return Graph::from_edge_list(20, edges);
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char ch : text) lines += ch == '\n';
  return lines;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

int comma_count(const std::string& line) {
  int commas = 0;
  for (char ch : line) commas += ch == ',';
  return commas;
}

}  // namespace

TEST_CASE("sweep-n config round trip rejects unknown keys") {
  SweepNConfig cfg;
  cfg.n_grid = {20, 30};
  cfg.replicates = 4;
  cfg.seed = 12;
  const Config text = cfg.to_config();
  CHECK_FALSE(text.contains("threads"));
  const SweepNConfig back = SweepNConfig::from_config(text);
  CHECK(back.n_grid == cfg.n_grid);
  CHECK(back.replicates == 4);
  CHECK(back.seed == 12);

  Config bad = cfg.to_config();
  bad.set("mystery", "1");
  CHECK_THROWS_AS(SweepNConfig::from_config(bad), std::invalid_argument);

  Config wrong = cfg.to_config();
  wrong.set("experiment", "families");
  CHECK_THROWS_AS(SweepNConfig::from_config(wrong), std::invalid_argument);

  Config threaded = cfg.to_config();
  threaded.set_int("threads", 4);
  CHECK(SweepNConfig::from_config(threaded).threads == 4);
}

TEST_CASE("all experiment configs echo every default") {
  for (const Config& echo :
       {SweepNConfig{}.to_config(), SweepPErConfig{}.to_config(),
        SweepQSbmConfig{}.to_config(), FamiliesConfig{}.to_config()}) {
    CHECK(echo.contains("experiment"));
    CHECK(echo.contains("replicates") + echo.contains("draws_per_family") ==
          1);
    CHECK(echo.contains("seed"));
    CHECK(echo.contains("tolerance"));
    CHECK(echo.contains("max_sweeps"));
    CHECK(echo.contains("max_attempts"));
    CHECK_FALSE(echo.contains("threads"));
  }
}

TEST_CASE("sweep-n output is byte-identical across worker counts") {
  SweepNConfig cfg;
  cfg.n_grid = {16, 24};
  cfg.replicates = 3;
  cfg.seed = 7;
  cfg.threads = 1;
  const ExperimentResult one = run_sweep_n(cfg);
  cfg.threads = 4;
  const ExperimentResult four = run_sweep_n(cfg);
  cfg.threads = 8;
  const ExperimentResult eight = run_sweep_n(cfg);
  CHECK(one.csv == four.csv);
  CHECK(one.csv == eight.csv);
  CHECK(one.summary_json == four.summary_json);
  CHECK(one.summary_json == eight.summary_json);
}

TEST_CASE("sweep-n emits one record per point and replicate") {
  SweepNConfig cfg;
  cfg.n_grid = {16, 20, 24};
  cfg.replicates = 2;
  cfg.seed = 3;
  const ExperimentResult result = run_sweep_n(cfg);
  const std::vector<std::string> rows = data_rows(result.csv);
  REQUIRE(rows.size() == 6);
  const int expected_commas = 17;  // 18 columns
  for (const std::string& row : rows) {
    CHECK(comma_count(row) == expected_commas);
  }
  CHECK(result.csv.find("# experiment = sweep-n") == 0);
  CHECK(result.csv.find("threads") == std::string::npos);

  const json summary = json::parse(result.summary_json);
  CHECK(summary["experiment"] == "sweep-n");
  CHECK(summary["points"].size() == 3);
  CHECK(summary.contains("failures_total"));
  for (const auto& point : summary["points"]) {
    CHECK(point["replicates"] == 2);
    CHECK(point.contains("mean_rel_error"));
    CHECK(point.contains("closed_form_bstar"));
  }
}

TEST_CASE("sweep-n records generation failures and keeps going") {
  SweepNConfig cfg;
  cfg.n_grid = {24};
  cfg.m = 4;
  cfg.p = 0.3;
  cfg.q = 0.0;  // blocks can never join: every draw is disconnected
  cfg.replicates = 2;
  cfg.seed = 5;
  cfg.max_attempts = 3;
  const ExperimentResult result = run_sweep_n(cfg);
  const json summary = json::parse(result.summary_json);
  CHECK(summary["failures_total"] == 2);
  CHECK(summary["points"][0]["mean_rel_error"].is_null());
  bool saw_error_row = false;
  for (const std::string& row : data_rows(result.csv)) {
    if (row.find("error:") != std::string::npos) saw_error_row = true;
    CHECK(comma_count(row) == 17);
  }
  CHECK(saw_error_row);
}

TEST_CASE("sweep over edge probability tracks the sign change") {
  SweepPErConfig cfg;
  cfg.n = 40;
  cfg.p_grid = {0.3, 0.5, 0.7};
  cfg.replicates = 2;
  cfg.seed = 5;
  cfg.threads = 4;
  const ExperimentResult result = run_sweep_p_er(cfg);
  const json summary = json::parse(result.summary_json);
  REQUIRE(summary["points"].size() == 3);
  CHECK(summary["points"][0]["mean_exact_inv_bstar"].get<double>() > 0.0);
  CHECK(summary["points"][2]["mean_exact_inv_bstar"].get<double>() < 0.0);
  CHECK(summary["points"][1]["mf_pole"].get<bool>());
  CHECK(summary["points"][1]["mf_inv_bstar"].get<double>() == 0.0);
  REQUIRE_FALSE(summary["sign_change"].is_null());
  CHECK(summary["sign_change"]["p_low"].get<double>() == 0.3);
  CHECK(summary["sign_change"]["p_high"].get<double>() == 0.5);

  const std::vector<std::string> rows = data_rows(result.csv);
  REQUIRE(rows.size() == 6);
  for (const std::string& row : rows) CHECK(comma_count(row) == 15);
}

TEST_CASE("sweep over q carries the phase-transition references") {
  SweepQSbmConfig cfg;
  cfg.n = 60;
  cfg.m_values = {2};
  cfg.q_grid = {0.05, 0.25, 0.45};
  cfg.replicates = 2;
  cfg.seed = 9;
  const ExperimentResult result = run_sweep_q_sbm(cfg);
  const json summary = json::parse(result.summary_json);
  REQUIRE(summary["series"].size() == 1);
  const auto& series = summary["series"][0];
  CHECK(series["m"] == 2);
  const QHat expect = q_hat(2, cfg.p, cfg.n);
  CHECK(series["qhat_expansion"].get<double>() ==
        doctest::Approx(expect.expansion));
  CHECK(series["qhat_exact_root"].get<double>() ==
        doctest::Approx(*expect.exact_root));
  CHECK(series["smallq_inv_bstar"].get<double>() ==
        doctest::Approx(bstar_small_q(cfg.n, 2, cfg.p).reciprocal()));
  CHECK(series["intercept_measured"].get<double>() ==
        series["points"][0]["mean_exact_inv_bstar"].get<double>());
  REQUIRE_FALSE(series["sign_change"].is_null());

  SweepQSbmConfig bad = cfg;
  bad.m_values = {1};
  CHECK_THROWS_AS(run_sweep_q_sbm(bad), std::invalid_argument);
}

TEST_CASE("families census reports per-family ratio statistics") {
  FamiliesConfig cfg;
  cfg.families = {Family::ER, Family::PAShifted};
  cfg.draws_per_family = 3;
  cfg.n_min = 40;
  cfg.n_max = 60;
  cfg.seed = 3;
  cfg.threads = 4;
  const ExperimentResult result = run_families_histogram(cfg);
  CHECK(result.csv.find("# note = desk-scale run") != std::string::npos);
  const std::vector<std::string> rows = data_rows(result.csv);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].rfind("er,", 0) == 0);
  CHECK(rows[3].rfind("pa-shifted,", 0) == 0);
  CHECK(rows[3].find("links_per_node=") != std::string::npos);

  const json summary = json::parse(result.summary_json);
  REQUIRE(summary["families"].size() == 2);
  for (const auto& family : summary["families"]) {
    CHECK(family["draws"] == 3);
    CHECK(family["ratios_recorded"].get<int>() +
              family["failures"].get<int>() ==
          3);
    if (family["ratios_recorded"].get<int>() > 0) {
      const double median = family["median_ratio"].get<double>();
      CHECK(median > 0.5);
      CHECK(median < 1.5);
    }
  }
  CHECK(summary["overall"].contains("median_ratio"));
  CHECK(summary.contains("resamples_total"));
}

TEST_CASE("families config round trips the family list") {
  FamiliesConfig cfg;
  cfg.families = {Family::UCM, Family::SBM};
  cfg.draws_per_family = 7;
  const Config text = cfg.to_config();
  const FamiliesConfig back = FamiliesConfig::from_config(text);
  REQUIRE(back.families.size() == 2);
  CHECK(back.families[0] == Family::UCM);
  CHECK(back.families[1] == Family::SBM);
  CHECK(back.draws_per_family == 7);
}

TEST_CASE("analyze reports both routes on a small graph") {
  AnalyzeOptions options;
  options.game = GameMatrix{3, 0, 5, 1};
  const AnalyzeReport report = analyze_graph(k4(), options);
  CHECK(report.moments.mu1 == doctest::Approx(3.0));
  CHECK(report.edges == 6);
  CHECK(report.exact_computed);
  CHECK(report.exact_bstar.value == doctest::Approx(-3.0).epsilon(1e-9));
  CHECK(report.mf_bstar.value == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(report.identity_relative_error < 1e-10);
  REQUIRE(report.sigma.has_value());
  CHECK(*report.sigma == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(report.sigma_source == "exact");
  REQUIRE(report.selection_verdict.has_value());
  CHECK_FALSE(*report.selection_verdict);
}

TEST_CASE("analyze falls back to mean-field beyond the exact cap") {
  AnalyzeOptions options;
  options.exact_size_cap = 10;
  const AnalyzeReport report = analyze_graph(ring20(), options);
  CHECK_FALSE(report.exact_computed);
  CHECK(report.mf_bstar.value == doctest::Approx(6.0).epsilon(1e-12));
  REQUIRE(report.sigma.has_value());
  CHECK(*report.sigma == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(report.sigma_source == "mean-field");
  // donation b=2, c=1 sits below b* = 6: defection favored
  REQUIRE(report.selection_verdict.has_value());
  CHECK_FALSE(*report.selection_verdict);
}

TEST_CASE("analyze marks sigma unavailable on poles") {
  std::vector<Graph::Edge> edges;
  for (int v = 1; v <= 8; ++v) edges.push_back({0, v});
  const Graph star = Graph::from_edge_list(9, edges);
  const AnalyzeReport report = analyze_graph(star, AnalyzeOptions{});
  CHECK_FALSE(report.sigma.has_value());
  CHECK(report.sigma_source == "unavailable");
  CHECK_FALSE(report.selection_verdict.has_value());
}

TEST_CASE("analyze refuses disconnected graphs by naming the components") {
  const Graph split = Graph::from_edge_list(6, {{0, 1}, {1, 2}, {3, 4}});
  CHECK_THROWS_WITH_AS(analyze_graph(split, AnalyzeOptions{}),
                       doctest::Contains("3, 2, 1"), std::invalid_argument);
}

TEST_CASE("analyze_file reads the graph from disk") {
  const std::string path = "test_experiments_k4.edges";
  write_edge_list_file(k4(), path);
  const AnalyzeReport report = analyze_file(path, AnalyzeOptions{});
  CHECK(report.moments.n == 4);
  std::remove(path.c_str());
  CHECK_THROWS_AS(analyze_file("missing.edges", AnalyzeOptions{}),
                  std::runtime_error);
}

TEST_CASE("simulate config parses games, placements, and sources") {
  Config cfg;
  cfg.set("experiment", "simulate");
  cfg.set("family", "er");
  cfg.set_int("n", 10);
  cfg.set_real("p", 0.5);
  cfg.set_real("delta", 0.02);
  cfg.set_int("trials", 500);
  cfg.set_u64("seed", 11);
  const SimulateConfig sim = SimulateConfig::from_config(cfg);
  REQUIRE(sim.generator.has_value());
  CHECK(sim.generator->family == Family::ER);
  CHECK(sim.game.R == doctest::Approx(1.0));  // donation(2, 1) default
  CHECK(sim.delta == 0.02);

  Config game = cfg;
  game.set_real("R", 3);
  CHECK_THROWS_AS(SimulateConfig::from_config(game), std::invalid_argument);
  game.set_real("S", 0);
  game.set_real("T", 5);
  game.set_real("P", 1);
  CHECK(SimulateConfig::from_config(game).game.T == doctest::Approx(5.0));

  Config both = cfg;
  both.set("graph_file", "x.edges");
  CHECK_THROWS_AS(SimulateConfig::from_config(both), std::invalid_argument);

  Config placed = cfg;
  placed.set("placement", "3");
  const SimulateConfig fixed = SimulateConfig::from_config(placed);
  CHECK(fixed.placement.kind == Placement::Kind::FixedNode);
  CHECK(fixed.placement.node == 3);

  Config junk = cfg;
  junk.set("surprise", "1");
  CHECK_THROWS_AS(SimulateConfig::from_config(junk), std::invalid_argument);
}

TEST_CASE("simulate cross-checks against the enumeration oracle") {
  SimulateConfig cfg;
  GeneratorSpec spec;
  spec.family = Family::ER;
  spec.n = 8;
  spec.seed = 23;
  spec.params = {{"p", 0.4}};
  cfg.generator = spec;
  cfg.delta = 0.01;
  cfg.trials = 20000;
  cfg.seed = 9;
  const SimulateReport report = run_simulate(cfg);
  CHECK(report.n == 8);
  REQUIRE(report.oracle_rho.has_value());
  REQUIRE(report.gap_in_se.has_value());
  CHECK(*report.gap_in_se <= 4.0);
  CHECK_FALSE(report.flagged);

  SimulateConfig no_oracle = cfg;
  no_oracle.oracle_size_cap = 4;
  CHECK_FALSE(run_simulate(no_oracle).oracle_rho.has_value());

  const SimulateReport again = run_simulate(cfg);
  CHECK(again.summary.fixations_c == report.summary.fixations_c);
}

TEST_CASE("simulate reads graphs from disk and echoes its config") {
  const std::string path = "test_experiments_sim.edges";
  write_edge_list_file(ring20(), path);
  SimulateConfig cfg;
  cfg.graph_file = path;
  cfg.trials = 200;
  cfg.delta = 0.0;
  const SimulateReport report = run_simulate(cfg);
  CHECK(report.n == 20);
  CHECK(report.edges == 40);
  std::remove(path.c_str());

  const Config echo = cfg.to_config();
  CHECK(echo.get_string("graph_file") == path);
  CHECK(echo.get_string("experiment") == "simulate");
  CHECK(echo.contains("R"));
  CHECK(echo.get_string("placement") == "uniform");

  SimulateConfig neither;
  neither.trials = 10;
  CHECK_THROWS_AS(run_simulate(neither), std::invalid_argument);
}

TEST_CASE("csv cells never leak separators from error text") {
  // config echo and status cells replace commas and newlines
  SweepNConfig cfg;
  cfg.n_grid = {24};
  cfg.m = 4;
  cfg.p = 0.3;
  cfg.q = 0.0;
  cfg.replicates = 1;
  cfg.seed = 5;
  cfg.max_attempts = 2;
  const ExperimentResult result = run_sweep_n(cfg);
  for (const std::string& row : data_rows(result.csv)) {
    CHECK(comma_count(row) == 17);
  }
  CHECK(count_lines(result.csv) >= 2);
}
