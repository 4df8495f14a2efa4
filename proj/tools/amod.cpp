// Command-line driver: single solves, parameter sweeps and oracle checks.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "amod/config.hpp"
#include "amod/error.hpp"
#include "amod/experiments.hpp"
#include "amod/model.hpp"
#include "amod/oracle.hpp"
#include "amod/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

int exit_code(amod::lp::Status s) {
  switch (s) {
    case amod::lp::Status::kOptimal:
      return kExitOk;
    case amod::lp::Status::kInfeasible:
    case amod::lp::Status::kUnbounded:
      return kExitInfeasible;
    case amod::lp::Status::kNumericalFailure:
      return kExitNumerical;
  }
  return kExitNumerical;
}

struct Globals {
  std::optional<std::string> congestion;
  std::optional<int> pwl_segments;
};

amod::ScenarioConfig load(const std::string& path, const Globals& g) {
  amod::ScenarioConfig cfg = amod::load_config(path);
  if (g.congestion) cfg.congestion_model = amod::congestion_model_from_string(*g.congestion);
  if (g.pwl_segments) cfg.pwl_segments = *g.pwl_segments;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw amod::DataError(e.what());
  }
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw amod::DataError("cannot write " + path);
  f << text;
}

int cmd_solve(const std::string& config_path, const std::string& out_path,
              const std::string& lp_path, const Globals& g) {
  const auto cfg = load(config_path, g);
  if (!lp_path.empty()) {
    auto sc = amod::load_scenario(cfg);
    const auto model = amod::build_lp(sc.graph, sc.demand, cfg);
    write_text(lp_path, amod::lp::to_lp_format(model.lp, amod::column_names(model)));
  }
  const auto outcome = amod::run_scenario(cfg);
  nlohmann::json j = amod::to_json(outcome);
  j["config"] = amod::config_to_json(cfg);
  if (outcome.solution.optimal()) j["solution"] = amod::to_json(outcome.solution);
  write_text(out_path, j.dump(2) + "\n");
  if (!outcome.solution.optimal()) {
    std::cerr << "amod: " << outcome.error << '\n';
    return exit_code(outcome.status);
  }
  if (!outcome.ok) {
    std::cerr << "amod: " << outcome.error << '\n';
    return kExitNumerical;
  }
  std::fprintf(stderr, "objective %.10g  t_avg %.6g h  shares W/M/R %.4f/%.4f/%.4f  (%.2fs)\n",
               outcome.metrics.objective, outcome.metrics.t_avg,
               outcome.metrics.share.walking, outcome.metrics.share.micromobility,
               outcome.metrics.share.amod, outcome.seconds);
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::string& values, const std::string& out_path, int workers,
              const Globals& g) {
  const auto cfg = load(config_path, g);
  amod::SweepParameter p;
  std::vector<double> vals;
  try {
    p = amod::sweep_parameter_from_string(param);
    vals = amod::parse_values(values);
  } catch (const std::invalid_argument& e) {
    std::cerr << "amod: " << e.what() << '\n';
    return kExitUsage;
  }
  const auto rows = amod::sweep(cfg, p, vals, workers);
  std::ostringstream csv;
  amod::write_sweep_csv(csv, p, rows);
  write_text(out_path, csv.str());
  const auto sidecar = amod::sweep_sidecar(cfg, p, rows);
  if (!out_path.empty() && out_path != "-") write_text(out_path + ".json", sidecar.dump(2) + "\n");
  int failed = 0;
  for (const auto& r : rows) failed += r.outcome.ok ? 0 : 1;
  if (sidecar.contains("steady_state_value") && !sidecar["steady_state_value"].is_null()) {
    std::cerr << "steady state from " << param << " = "
              << sidecar["steady_state_value"].get<double>() << '\n';
  }
  if (failed > 0) {
    std::cerr << "amod: " << failed << " of " << rows.size() << " sweep points failed\n";
    return kExitNumerical;
  }
  return kExitOk;
}

// Solves the configured scenario and an uncapacitated copy, comparing both
// against the shortest-path oracle.
int cmd_validate(const std::string& config_path, const Globals& g) {
  const auto cfg = load(config_path, g);
  const auto net = amod::tntp::read_net_file(cfg.net_file.string());
  const auto trips = amod::tntp::read_trips_file(cfg.trips_file.string());
  const auto sc = amod::build_scenario(net, trips, cfg);
  const double oracle = amod::uncapacitated_optimum(sc.graph, sc.demand);

  bool pass = true;
  const auto run = amod::run_scenario(net, trips, cfg);
  if (!run.solution.optimal()) {
    std::cerr << "amod: configured scenario: " << run.error << '\n';
    return exit_code(run.status);
  }
  const bool bound_ok = run.solution.objective >= oracle * (1 - 1e-9);
  std::printf("%s  verify: max conservation residual %.3g, gap %.3g\n",
              run.ok ? "PASS" : "FAIL", run.report.max_conservation_relative,
              run.solution.relative_gap);
  std::printf("%s  oracle lower bound: objective %.10g >= %.10g\n",
              bound_ok ? "PASS" : "FAIL", run.solution.objective, oracle);
  pass = pass && run.ok && bound_ok;

  amod::ScenarioConfig free = cfg;
  free.fleet_road = free.fleet_micro = free.beta_node = free.beta_total = 1e9;
  free.switch_capacity = 1e9;
  free.road_capacity_scale = 1e9;
  free.congestion_model = amod::CongestionModel::kThreshold;
  const auto relaxed = amod::run_scenario(net, trips, free);
  if (!relaxed.solution.optimal()) {
    std::cerr << "amod: uncapacitated scenario: " << relaxed.error << '\n';
    return exit_code(relaxed.status);
  }
  const double rel = std::abs(relaxed.solution.objective - oracle) / std::max(1.0, std::abs(oracle));
  const bool eq_ok = rel <= 1e-6;
  std::printf("%s  uncapacitated objective %.10g vs oracle %.10g (rel %.2e)\n",
              eq_ok ? "PASS" : "FAIL", relaxed.solution.objective, oracle, rel);
  pass = pass && eq_ok;
  return pass ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intermodal AMoD and micromobility network-flow optimizer"};
  app.require_subcommand(1);
  Globals globals;
  std::string congestion;
  int pwl_segments = 0;
  app.add_option("--congestion", congestion, "Congestion model: threshold or pwl")
      ->check(CLI::IsMember({"threshold", "pwl"}));
  app.add_option("--pwl-segments", pwl_segments, "Tangent count K for the pwl model")
      ->check(CLI::PositiveNumber);

  std::string config, out, lp_out, param, values;
  int workers = 1;

  auto* solve = app.add_subcommand("solve", "Solve one scenario");
  solve->add_option("--config", config, "Scenario JSON")->required();
  solve->add_option("--out", out, "Result JSON (default stdout)");
  solve->add_option("--lp-out", lp_out, "Also write the LP in CPLEX LP format");

  auto* sw = app.add_subcommand("sweep", "Sweep one parameter");
  sw->add_option("--config", config, "Scenario JSON")->required();
  sw->add_option("--param", param, "n_R, n_M, beta_node, beta_total or h_S")->required();
  sw->add_option("--values", values, "List a,b,c or range start:stop:step")->required();
  sw->add_option("--out", out, "CSV path; a .json sidecar is written next to it");
  sw->add_option("--workers", workers, "Concurrent solves")->check(CLI::PositiveNumber);

  auto* val = app.add_subcommand("validate", "Cross-check against the shortest-path oracle");
  val->add_option("--config", config, "Scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  if (!congestion.empty()) globals.congestion = congestion;
  if (pwl_segments > 0) globals.pwl_segments = pwl_segments;

  try {
    if (*solve) return cmd_solve(config, out, lp_out, globals);
    if (*sw) return cmd_sweep(config, param, values, out, workers, globals);
    if (*val) return cmd_validate(config, globals);
  } catch (const amod::DataError& e) {
    std::cerr << "amod: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "amod: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
