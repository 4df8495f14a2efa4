#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "amod/config.hpp"
#include "amod/graph.hpp"
#include "amod/solution.hpp"
#include "json.hpp"

namespace amod {

// Per-arc travel times used for reporting: free-flow times, except road arcs
// in PWL mode, where BPR is evaluated at the solved total road flow.
std::vector<double> arc_times(const FlowSolution& sol, const Supergraph& g,
                              const ScenarioConfig& config);

// Sum of t * X over every arc (switching included) divided by total demand.
// Throws std::invalid_argument when total demand is not positive.
double average_travel_time(const FlowSolution& sol, const Supergraph& g,
                           const ScenarioConfig& config, double total_demand);

struct ModalShare {
  double walking = 0.0;
  double micromobility = 0.0;
  double amod = 0.0;
};

// Time-weighted flow fractions over non-switching arcs. Throws
// std::invalid_argument when no time is spent on any of them.
ModalShare modal_share_time(const FlowSolution& sol, const Supergraph& g,
                            const ScenarioConfig& config);

struct RebalancingTotals {
  double amod = 0.0;   // sum of x0, or of t0 * x0 when time weighted
  double micro = 0.0;  // sum of beta_in
};

RebalancingTotals rebalancing_totals(const FlowSolution& sol, const Supergraph& g,
                                     bool time_weighted = false);

struct ScenarioMetrics {
  double objective = 0.0;
  double t_avg = 0.0;
  ModalShare share;
  double amod_rebalancing_total = 0.0;
  double micro_rebalancing_total = 0.0;
};

ScenarioMetrics compute_metrics(const FlowSolution& sol, const Supergraph& g,
                                const ScenarioConfig& config, double total_demand);

std::string metrics_csv_header();
std::string to_csv_row(const ScenarioMetrics& m);
nlohmann::json to_json(const ScenarioMetrics& m);

}  // namespace amod
