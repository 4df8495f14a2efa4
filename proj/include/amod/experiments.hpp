#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amod/config.hpp"
#include "amod/metrics.hpp"
#include "amod/solution.hpp"
#include "amod/tntp.hpp"
#include "json.hpp"

namespace amod {

enum class SweepParameter { kFleetRoad, kFleetMicro, kBetaNode, kBetaTotal, kSwitchCapacity };

// Config key names: n_R, n_M, beta_node, beta_total, h_S.
std::string_view to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(std::string_view name);
void apply(ScenarioConfig& config, SweepParameter p, double value);

// "a,b,c" or an inclusive range "start:stop:step". Throws
// std::invalid_argument on malformed input.
std::vector<double> parse_values(std::string_view text);

struct RunOutcome {
  lp::Status status = lp::Status::kNumericalFailure;
  bool ok = false;  // optimal and verified
  FlowSolution solution;
  VerifyReport report;
  ScenarioMetrics metrics;
  double total_demand = 0.0;
  double seconds = 0.0;
  std::string error;
};

SolveOptions solve_options(const ScenarioConfig& config);

// ingest -> build -> solve -> verify -> metrics. Data errors propagate as
// DataError; solver outcomes are reported through `status`.
RunOutcome run_scenario(const ScenarioConfig& config);
RunOutcome run_scenario(const tntp::Network& net, const tntp::Trips& trips,
                        const ScenarioConfig& config);

struct SweepRow {
  double value = 0.0;
  RunOutcome outcome;
};

// One independent solve per value on up to `workers` threads. Rows come back
// sorted by value; a failed point is recorded and the sweep continues.
std::vector<SweepRow> sweep(const ScenarioConfig& base, SweepParameter p,
                            std::vector<double> values, int workers = 1);
std::vector<SweepRow> sweep(const tntp::Network& net, const tntp::Trips& trips,
                            const ScenarioConfig& base, SweepParameter p,
                            std::vector<double> values, int workers = 1);

// First index from which every successive relative change of `series` stays
// below `tolerance`; nullopt when the tail never flattens.
std::optional<std::size_t> steady_state_index(std::span<const double> series,
                                              double tolerance = 1e-4);

void write_sweep_csv(std::ostream& out, SweepParameter p,
                     std::span<const SweepRow> rows);
nlohmann::json sweep_sidecar(const ScenarioConfig& base, SweepParameter p,
                             std::span<const SweepRow> rows);
nlohmann::json to_json(const RunOutcome& outcome);

}  // namespace amod
