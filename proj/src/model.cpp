#include "amod/model.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "amod/congestion.hpp"

namespace amod {

std::vector<Commodity> per_request_commodities(const DemandSet& demand) {
  std::vector<Commodity> out;
  out.reserve(demand.size());
  for (const Request& r : demand.requests()) {
    out.push_back({r.origin, {{r.destination, r.rate}}, r.rate});
  }
  return out;
}

std::vector<Commodity> aggregate_commodities(const DemandSet& demand) {
  std::map<NodeRef, std::size_t> slot;
  std::vector<Commodity> out;
  for (const Request& r : demand.requests()) {
    auto [it, inserted] = slot.try_emplace(r.origin, out.size());
    if (inserted) out.push_back({r.origin, {}, 0.0});
    Commodity& c = out[it->second];
    c.sinks.emplace_back(r.destination, r.rate);
    c.rate += r.rate;
  }
  return out;
}

std::string_view to_string(RowFamily f) {
  switch (f) {
    case RowFamily::kUserConservation:
      return "user_conservation";
    case RowFamily::kRoadBalance:
      return "road_vehicle_balance";
    case RowFamily::kMicroBalance:
      return "micro_vehicle_balance";
    case RowFamily::kRebalancingBalance:
      return "micro_rebalancing_balance";
    case RowFamily::kRebalancingTotal:
      return "micro_rebalancing_total";
    case RowFamily::kFleetRoad:
      return "fleet_road";
    case RowFamily::kFleetMicro:
      return "fleet_micro";
    case RowFamily::kRoadCapacity:
      return "road_capacity";
    case RowFamily::kSwitchCapacity:
      return "switch_capacity";
    case RowFamily::kNodeRebalancingCap:
      return "node_rebalancing_cap";
    case RowFamily::kEpigraph:
      return "latency_epigraph";
  }
  return "?";
}

VariableIndex::VariableIndex(int commodities, int arcs, int road_arcs,
                             int micro_nodes, bool epigraph)
    : commodities_(commodities),
      arcs_(arcs),
      road_arcs_(road_arcs),
      micro_nodes_(micro_nodes),
      has_epigraph_(epigraph) {
  rebal_begin_ = commodities * arcs;
  beta_begin_ = rebal_begin_ + road_arcs;
  epi_begin_ = beta_begin_ + 2 * micro_nodes;
  size_ = epi_begin_ + (epigraph ? road_arcs : 0);
}

namespace {

bool pwl(const ScenarioConfig& c) {
  return c.congestion_model == CongestionModel::kPiecewiseBpr;
}

bool has_road_capacity_rows(const ScenarioConfig& c) {
  return !pwl(c) || c.pwl_keep_capacity;
}

int tag(RowFamily f) { return static_cast<int>(f); }

// Accumulates one sparse row.
struct RowBuilder {
  std::vector<int> cols;
  std::vector<double> vals;

  void add(int col, double v) {
    cols.push_back(col);
    vals.push_back(v);
  }
  void emit(lp::LpProblem& lp, lp::Sense sense, double rhs, RowFamily f) {
    lp.add_row(cols, vals, sense, rhs, tag(f));
    cols.clear();
    vals.clear();
  }
};

}  // namespace

RowCounts expected_row_counts(const Supergraph& g, int commodities,
                              const ScenarioConfig& config) {
  RowCounts rc;
  rc.conservation = commodities * g.node_count();
  rc.road_balance = g.layer_node_count(Layer::kRoad);
  rc.micro_balance = g.layer_node_count(Layer::kMicromobility);
  rc.rebalancing = 2;
  rc.fleet = 2;
  const int road_arcs = g.arc_kind_count(ArcKind::kRoad);
  rc.road_capacity = has_road_capacity_rows(config) ? road_arcs : 0;
  rc.switch_capacity = g.arc_kind_count(ArcKind::kSwitch);
  rc.node_rebalancing_cap = 2 * g.layer_node_count(Layer::kMicromobility);
  rc.epigraph = pwl(config) ? config.pwl_segments * road_arcs : 0;
  return rc;
}

int expected_column_count(const Supergraph& g, int commodities,
                          const ScenarioConfig& config) {
  const int road_arcs = g.arc_kind_count(ArcKind::kRoad);
  return commodities * g.arc_count() + road_arcs +
         2 * g.layer_node_count(Layer::kMicromobility) +
         (pwl(config) ? road_arcs : 0);
}

LinearModel build_lp(const Supergraph& g, const DemandSet& demand,
                     const ScenarioConfig& config) {
  return build_lp(g,
                  config.aggregate_commodities
                      ? aggregate_commodities(demand)
                      : per_request_commodities(demand),
                  config);
}

LinearModel build_lp(const Supergraph& g, std::vector<Commodity> commodities,
                     const ScenarioConfig& config) {
  config.validate();
  const auto [road_b, road_e] = g.arc_range(ArcKind::kRoad);
  const auto [micro_b, micro_e] = g.arc_range(ArcKind::kMicro);
  const int road_arcs = road_e - road_b;
  const int micro_nodes = g.layer_node_count(Layer::kMicromobility);
  const int E = g.arc_count();
  const int N = g.node_count();
  const int M = static_cast<int>(commodities.size());

  if (!pwl(config) || config.pwl_keep_capacity) {
    for (int a = road_b; a < road_e; ++a) {
      if (!std::isfinite(g.arc(a).capacity)) {
        throw std::invalid_argument(
            "build_lp: road arc " + std::to_string(a - road_b) +
            " has no capacity; the capacity constraint needs one");
      }
    }
  }
  for (const Commodity& c : commodities) {
    if (!g.contains(c.origin)) {
      throw std::invalid_argument("build_lp: commodity origin outside graph");
    }
    for (const auto& [d, rate] : c.sinks) {
      if (!g.contains(d)) {
        throw std::invalid_argument("build_lp: destination outside graph");
      }
      if (!(rate > 0.0)) {
        throw std::invalid_argument("build_lp: non-positive sink rate");
      }
    }
  }

  LinearModel model;
  model.node_count = N;
  model.index = VariableIndex(M, E, road_arcs, micro_nodes, pwl(config));
  const VariableIndex& ix = model.index;
  lp::LpProblem& lp = model.lp;

  // Columns.
  for (int m = 0; m < M; ++m) {
    for (int a = 0; a < E; ++a) {
      const Arc& arc = g.arc(a);
      const bool latency_in_epigraph = pwl(config) && arc.kind == ArcKind::kRoad;
      lp.add_column(latency_in_epigraph ? 0.0 : arc.free_flow_time);
    }
  }
  for (int r = 0; r < road_arcs; ++r) lp.add_column(0.0);
  std::vector<char> rebalancing_enabled(micro_nodes, config.rebalancing_nodes ? 0 : 1);
  if (config.rebalancing_nodes) {
    for (int id : *config.rebalancing_nodes) {
      if (id < 1 || id > micro_nodes) {
        throw std::invalid_argument("rebalancing node id out of range: " +
                                    std::to_string(id));
      }
      rebalancing_enabled[id - 1] = 1;
    }
  }
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < micro_nodes; ++j) {
      lp.add_column(0.0, rebalancing_enabled[j] ? lp::kInf : 0.0);
    }
  }
  if (pwl(config)) {
    for (int r = 0; r < road_arcs; ++r) lp.add_column(1.0);
  }

  // A zero fleet with positive arc times pins those flows at zero; fixing the
  // bounds keeps them exactly zero instead of solver-small.
  auto pin_if_no_fleet = [&](double fleet, int b, int e) {
    if (fleet != 0.0) return;
    for (int a = b; a < e; ++a) {
      if (!(g.arc(a).free_flow_time > 0.0)) return;
    }
    for (int m = 0; m < M; ++m) {
      for (int a = b; a < e; ++a) lp.set_upper(ix.user_flow(m, a), 0.0);
    }
  };
  pin_if_no_fleet(config.fleet_road, road_b, road_e);
  pin_if_no_fleet(config.fleet_micro, micro_b, micro_e);

  RowBuilder row;

  // User flow conservation with demand compliance.
  for (int m = 0; m < M; ++m) {
    std::vector<double> net_demand(N, 0.0);
    const Commodity& c = commodities[m];
    net_demand[g.node_index(c.origin)] -= c.rate;
    for (const auto& [d, rate] : c.sinks) net_demand[g.node_index(d)] += rate;
    for (int v = 0; v < N; ++v) {
      const NodeRef node = g.node_ref(v);
      for (int a : g.in_arcs(node)) row.add(ix.user_flow(m, a), 1.0);
      for (int a : g.out_arcs(node)) row.add(ix.user_flow(m, a), -1.0);
      row.emit(lp, lp::Sense::kEqual, net_demand[v], RowFamily::kUserConservation);
    }
  }

  // AMoD vehicle balance on road nodes.
  for (int v = 0; v < g.layer_node_count(Layer::kRoad); ++v) {
    const NodeRef node{Layer::kRoad, v};
    for (int a : g.in_arcs(node)) {
      if (g.arc(a).kind != ArcKind::kRoad) continue;
      for (int m = 0; m < M; ++m) row.add(ix.user_flow(m, a), 1.0);
      row.add(ix.rebalancing(a - road_b), 1.0);
    }
    for (int a : g.out_arcs(node)) {
      if (g.arc(a).kind != ArcKind::kRoad) continue;
      for (int m = 0; m < M; ++m) row.add(ix.user_flow(m, a), -1.0);
      row.add(ix.rebalancing(a - road_b), -1.0);
    }
    row.emit(lp, lp::Sense::kEqual, 0.0, RowFamily::kRoadBalance);
  }

  // Micromobility vehicle balance with operator feed/withdrawal.
  for (int v = 0; v < micro_nodes; ++v) {
    const NodeRef node{Layer::kMicromobility, v};
    for (int a : g.in_arcs(node)) {
      if (g.arc(a).kind != ArcKind::kMicro) continue;
      for (int m = 0; m < M; ++m) row.add(ix.user_flow(m, a), 1.0);
    }
    for (int a : g.out_arcs(node)) {
      if (g.arc(a).kind != ArcKind::kMicro) continue;
      for (int m = 0; m < M; ++m) row.add(ix.user_flow(m, a), -1.0);
    }
    row.add(ix.beta_in(v), 1.0);
    row.add(ix.beta_out(v), -1.0);
    row.emit(lp, lp::Sense::kEqual, 0.0, RowFamily::kMicroBalance);
  }

  // Rebalancing units conserved and bounded.
  for (int v = 0; v < micro_nodes; ++v) {
    row.add(ix.beta_in(v), 1.0);
    row.add(ix.beta_out(v), -1.0);
  }
  row.emit(lp, lp::Sense::kEqual, 0.0, RowFamily::kRebalancingBalance);
  for (int v = 0; v < micro_nodes; ++v) row.add(ix.beta_in(v), 1.0);
  row.emit(lp, lp::Sense::kLessEqual, config.beta_total, RowFamily::kRebalancingTotal);

  // Fleet-size budgets.
  for (int a = road_b; a < road_e; ++a) {
    const double t = g.arc(a).free_flow_time;
    for (int m = 0; m < M; ++m) row.add(ix.user_flow(m, a), t);
    if (config.include_rebalancing_in_fleet) row.add(ix.rebalancing(a - road_b), t);
  }
  row.emit(lp, lp::Sense::kLessEqual, config.fleet_road, RowFamily::kFleetRoad);
  for (int a = micro_b; a < micro_e; ++a) {
    const double t = g.arc(a).free_flow_time;
    for (int m = 0; m < M; ++m) row.add(ix.user_flow(m, a), t);
  }
  row.emit(lp, lp::Sense::kLessEqual, config.fleet_micro, RowFamily::kFleetMicro);

  // Road capacity (threshold congestion).
  if (has_road_capacity_rows(config)) {
    for (int a = road_b; a < road_e; ++a) {
      for (int m = 0; m < M; ++m) row.add(ix.user_flow(m, a), 1.0);
      row.add(ix.rebalancing(a - road_b), 1.0);
      row.emit(lp, lp::Sense::kLessEqual, g.arc(a).capacity, RowFamily::kRoadCapacity);
    }
  }

  // Switching capacity.
  const auto [sw_b, sw_e] = g.arc_range(ArcKind::kSwitch);
  for (int a = sw_b; a < sw_e; ++a) {
    for (int m = 0; m < M; ++m) row.add(ix.user_flow(m, a), 1.0);
    row.emit(lp, lp::Sense::kLessEqual, g.arc(a).capacity, RowFamily::kSwitchCapacity);
  }

  // Per-node rebalancing capacity, feed then withdrawal.
  for (int v = 0; v < micro_nodes; ++v) {
    row.add(ix.beta_in(v), 1.0);
    row.emit(lp, lp::Sense::kLessEqual, config.beta_node, RowFamily::kNodeRebalancingCap);
  }
  for (int v = 0; v < micro_nodes; ++v) {
    row.add(ix.beta_out(v), 1.0);
    row.emit(lp, lp::Sense::kLessEqual, config.beta_node, RowFamily::kNodeRebalancingCap);
  }

  // Latency epigraph: tau_a >= slope_k * (X_a + x0_a) + intercept_k.
  if (pwl(config)) {
    for (int a = road_b; a < road_e; ++a) {
      const Arc& arc = g.arc(a);
      const BprParams p{arc.free_flow_time, arc.capacity};
      if (!std::isfinite(p.capacity)) {
        throw std::invalid_argument("build_lp: BPR latency needs road capacities");
      }
      const auto pieces = linearize_total_latency(
          p, config.pwl_segments, config.pwl_range_factor * arc.capacity);
      for (const auto& s : pieces) {
        for (int m = 0; m < M; ++m) row.add(ix.user_flow(m, a), s.slope);
        row.add(ix.rebalancing(a - road_b), s.slope);
        row.add(ix.epigraph(a - road_b), -1.0);
        row.emit(lp, lp::Sense::kLessEqual, -s.intercept, RowFamily::kEpigraph);
      }
    }
  }

  model.commodities = std::move(commodities);
  return model;
}

lp::LpProblem rebalancing_program(const lp::LpProblem& base,
                                  const lp::Result& optimal,
                                  const LinearModel& model, const Supergraph& g,
                                  RebalancingTarget target, bool time_weighted) {
  lp::LpProblem out = lp::restrict_to_optimal_face(base, optimal);
  for (int j = 0; j < out.num_cols(); ++j) out.set_cost(j, 0.0);
  const VariableIndex& ix = model.index;
  if (target == RebalancingTarget::kAmod) {
    const int road_b = g.arc_range(ArcKind::kRoad).first;
    for (int r = 0; r < ix.road_arcs(); ++r) {
      out.set_cost(ix.rebalancing(r),
                   time_weighted ? g.arc(road_b + r).free_flow_time : 1.0);
    }
  } else {
    for (int v = 0; v < ix.micro_nodes(); ++v) {
      out.set_cost(ix.beta_in(v), 1.0);
      out.set_cost(ix.beta_out(v), 1.0);
    }
  }
  return out;
}

std::vector<std::string> column_names(const LinearModel& model) {
  const VariableIndex& ix = model.index;
  std::vector<std::string> names(ix.size());
  for (int m = 0; m < ix.commodities(); ++m) {
    for (int a = 0; a < ix.arcs(); ++a) {
      names[ix.user_flow(m, a)] = "x_" + std::to_string(m) + "_" + std::to_string(a);
    }
  }
  for (int r = 0; r < ix.road_arcs(); ++r) {
    names[ix.rebalancing(r)] = "x0_" + std::to_string(r);
  }
  for (int v = 0; v < ix.micro_nodes(); ++v) {
    names[ix.beta_in(v)] = "bin_" + std::to_string(v);
    names[ix.beta_out(v)] = "bout_" + std::to_string(v);
  }
  if (ix.has_epigraph()) {
    for (int r = 0; r < ix.road_arcs(); ++r) {
      names[ix.epigraph(r)] = "tau_" + std::to_string(r);
    }
  }
  return names;
}

}  // namespace amod
