#include "amod/metrics.hpp"

#include <cstdio>
#include <stdexcept>

#include "amod/congestion.hpp"

namespace amod {

std::vector<double> arc_times(const FlowSolution& sol, const Supergraph& g,
                              const ScenarioConfig& config) {
  std::vector<double> t(g.arc_count());
  for (int a = 0; a < g.arc_count(); ++a) t[a] = g.arc(a).free_flow_time;
  if (config.congestion_model == CongestionModel::kPiecewiseBpr) {
    const auto [b, e] = g.arc_range(ArcKind::kRoad);
    for (int a = b; a < e; ++a) {
      double x = sol.aggregate_flow[a];
      if (!sol.rebalancing_flow.empty()) x += sol.rebalancing_flow[a - b];
      t[a] = bpr_time({g.arc(a).free_flow_time, g.arc(a).capacity},
                      std::max(0.0, x));
    }
  }
  return t;
}

double average_travel_time(const FlowSolution& sol, const Supergraph& g,
                           const ScenarioConfig& config, double total_demand) {
  if (!(total_demand > 0.0)) {
    throw std::invalid_argument("average_travel_time: no demand");
  }
  const auto t = arc_times(sol, g, config);
  double sum = 0.0;
  for (int a = 0; a < g.arc_count(); ++a) sum += t[a] * sol.aggregate_flow[a];
  return sum / total_demand;
}

ModalShare modal_share_time(const FlowSolution& sol, const Supergraph& g,
                            const ScenarioConfig& config) {
  const auto t = arc_times(sol, g, config);
  double by_kind[4] = {0.0, 0.0, 0.0, 0.0};
  for (int a = 0; a < g.arc_count(); ++a) {
    by_kind[static_cast<int>(g.arc(a).kind)] += t[a] * std::max(0.0, sol.aggregate_flow[a]);
  }
  const double walk = by_kind[static_cast<int>(ArcKind::kWalk)];
  const double micro = by_kind[static_cast<int>(ArcKind::kMicro)];
  const double road = by_kind[static_cast<int>(ArcKind::kRoad)];
  const double total = walk + micro + road;
  if (!(total > 0.0)) {
    throw std::invalid_argument("modal_share_time: no travel time on any mode");
  }
  return {walk / total, micro / total, road / total};
}

RebalancingTotals rebalancing_totals(const FlowSolution& sol, const Supergraph& g,
                                     bool time_weighted) {
  RebalancingTotals r;
  const int road_b = g.arc_range(ArcKind::kRoad).first;
  for (std::size_t k = 0; k < sol.rebalancing_flow.size(); ++k) {
    const double w = time_weighted ? g.arc(road_b + static_cast<int>(k)).free_flow_time : 1.0;
    r.amod += w * sol.rebalancing_flow[k];
  }
  for (double b : sol.beta_in) r.micro += b;
  return r;
}

ScenarioMetrics compute_metrics(const FlowSolution& sol, const Supergraph& g,
                                const ScenarioConfig& config, double total_demand) {
  ScenarioMetrics m;
  m.objective = sol.objective;
  m.t_avg = average_travel_time(sol, g, config, total_demand);
  m.share = modal_share_time(sol, g, config);
  const auto rb = rebalancing_totals(sol, g, config.time_weighted_rebalancing);
  m.amod_rebalancing_total = rb.amod;
  m.micro_rebalancing_total = rb.micro;
  return m;
}

std::string metrics_csv_header() {
  return "objective,t_avg,share_walking,share_micromobility,share_amod,"
         "amod_rebalancing_total,micro_rebalancing_total";
}

std::string to_csv_row(const ScenarioMetrics& m) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                m.objective, m.t_avg, m.share.walking, m.share.micromobility,
                m.share.amod, m.amod_rebalancing_total, m.micro_rebalancing_total);
  return buf;
}

nlohmann::json to_json(const ScenarioMetrics& m) {
  return {{"objective", m.objective},
          {"t_avg", m.t_avg},
          {"share_walking", m.share.walking},
          {"share_micromobility", m.share.micromobility},
          {"share_amod", m.share.amod},
          {"amod_rebalancing_total", m.amod_rebalancing_total},
          {"micro_rebalancing_total", m.micro_rebalancing_total}};
}

}  // namespace amod
