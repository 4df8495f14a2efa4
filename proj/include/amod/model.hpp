#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "amod/config.hpp"
#include "amod/graph.hpp"
#include "amod/lp.hpp"
#include "amod/scenario.hpp"
#include "amod/solver.hpp"

namespace amod {

// A flow commodity: one origin feeding one or more destinations. Per-request
// commodities have exactly one sink.
struct Commodity {
  NodeRef origin;
  std::vector<std::pair<NodeRef, double>> sinks;
  double rate = 0.0;  // sum of sink rates
};

std::vector<Commodity> per_request_commodities(const DemandSet& demand);

// One commodity per distinct origin. Conservation is linear in the flows, so
// the optimum of the aggregated program equals the per-request optimum.
std::vector<Commodity> aggregate_commodities(const DemandSet& demand);

enum class RowFamily : int {
  kUserConservation,
  kRoadBalance,
  kMicroBalance,
  kRebalancingBalance,
  kRebalancingTotal,
  kFleetRoad,
  kFleetMicro,
  kRoadCapacity,
  kSwitchCapacity,
  kNodeRebalancingCap,
  kEpigraph,
};
inline constexpr int kRowFamilyCount = 11;

std::string_view to_string(RowFamily f);

// Dense, contiguous column layout:
//   [user flows m-major | AMoD rebalancing | beta_in | beta_out | epigraph]
// Road and micromobility vehicle flows are the user-flow columns of the
// corresponding arcs; no separate copies exist.
class VariableIndex {
 public:
  VariableIndex() = default;
  VariableIndex(int commodities, int arcs, int road_arcs, int micro_nodes,
                bool epigraph);

  int user_flow(int commodity, int arc) const {
    return commodity * arcs_ + arc;
  }
  int rebalancing(int road_arc) const { return rebal_begin_ + road_arc; }
  int beta_in(int micro_node) const { return beta_begin_ + micro_node; }
  int beta_out(int micro_node) const {
    return beta_begin_ + micro_nodes_ + micro_node;
  }
  int epigraph(int road_arc) const { return epi_begin_ + road_arc; }

  int commodities() const { return commodities_; }
  int arcs() const { return arcs_; }
  int road_arcs() const { return road_arcs_; }
  int micro_nodes() const { return micro_nodes_; }
  bool has_epigraph() const { return has_epigraph_; }
  int size() const { return size_; }

 private:
  int commodities_ = 0;
  int arcs_ = 0;
  int road_arcs_ = 0;
  int micro_nodes_ = 0;
  bool has_epigraph_ = false;
  int rebal_begin_ = 0;
  int beta_begin_ = 0;
  int epi_begin_ = 0;
  int size_ = 0;
};

struct LinearModel {
  lp::LpProblem lp;
  VariableIndex index;
  std::vector<Commodity> commodities;
  // Row of the conservation constraint for (commodity, dense node index) is
  // commodity * node_count + node.
  int node_count = 0;
};

// Assembles the intermodal program. Throws std::invalid_argument for an
// inconsistent configuration (e.g. threshold mode without road capacities).
LinearModel build_lp(const Supergraph& g, const DemandSet& demand,
                     const ScenarioConfig& config);
LinearModel build_lp(const Supergraph& g, std::vector<Commodity> commodities,
                     const ScenarioConfig& config);

// Closed-form row counts for the layout above.
struct RowCounts {
  int conservation = 0;
  int road_balance = 0;
  int micro_balance = 0;
  int rebalancing = 0;
  int fleet = 0;
  int road_capacity = 0;
  int switch_capacity = 0;
  int node_rebalancing_cap = 0;
  int epigraph = 0;

  int total() const {
    return conservation + road_balance + micro_balance + rebalancing + fleet +
           road_capacity + switch_capacity + node_rebalancing_cap + epigraph;
  }
};
RowCounts expected_row_counts(const Supergraph& g, int commodities,
                              const ScenarioConfig& config);
int expected_column_count(const Supergraph& g, int commodities,
                          const ScenarioConfig& config);

enum class RebalancingTarget { kAmod, kMicro };

// `base` restricted to the optimal face of `optimal`, with the AMoD
// rebalancing flow or the micromobility feed plus withdrawal as objective.
// Applied twice (AMoD first) it picks the least-rebalancing routing among
// the optima.
lp::LpProblem rebalancing_program(const lp::LpProblem& base,
                                  const lp::Result& optimal,
                                  const LinearModel& model, const Supergraph& g,
                                  RebalancingTarget target, bool time_weighted);

// Human-readable column names for LP export.
std::vector<std::string> column_names(const LinearModel& model);

}  // namespace amod
