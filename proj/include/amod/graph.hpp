#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "amod/config.hpp"

namespace amod {

enum class Layer : std::uint8_t { kWalking = 0, kMicromobility = 1, kRoad = 2 };
inline constexpr int kLayerCount = 3;

enum class ArcKind : std::uint8_t { kWalk, kMicro, kRoad, kSwitch };

std::string_view to_string(Layer layer);
ArcKind arc_kind_of(Layer layer);

struct NodeRef {
  Layer layer = Layer::kWalking;
  int local_id = 0;

  auto operator<=>(const NodeRef&) const = default;
};

struct Arc {
  NodeRef tail;
  NodeRef head;
  ArcKind kind = ArcKind::kWalk;
  double length = 0.0;    // km; 0 for switching arcs
  double speed = 0.0;     // km/h; unused for switching arcs
  double capacity = kUnlimited;  // flow units per hour
  double free_flow_time = 0.0;   // hours
};

// Eq. t0 = length / speed. Throws std::invalid_argument for speed <= 0 or
// negative length.
double free_flow_time(double length_km, double speed_kmh);

// One mode's digraph. Arcs are validated on construction (layer membership,
// no self loops, positive capacity); connectivity is checked separately.
class LayeredNetwork {
 public:
  LayeredNetwork(Layer layer, int node_count, std::vector<Arc> arcs);

  Layer layer() const { return layer_; }
  int node_count() const { return node_count_; }
  std::span<const Arc> arcs() const { return arcs_; }

 private:
  Layer layer_;
  int node_count_;
  std::vector<Arc> arcs_;
};

// Convenience for building a layer from (tail, head, length) triples with a
// uniform speed; capacities default to unlimited.
struct ArcSpec {
  int tail;
  int head;
  double length;
  double capacity = kUnlimited;
};
LayeredNetwork make_layer(Layer layer, int node_count,
                          std::span<const ArcSpec> arcs, double speed);

// The union of the three layers plus switching arcs. Dense arc ids are laid
// out as [walk | micro | road | switch]; dense node ids as [W | M | R].
class Supergraph {
 public:
  Supergraph(LayeredNetwork walking, LayeredNetwork micro, LayeredNetwork road,
             std::vector<Arc> switch_arcs);

  const LayeredNetwork& layer(Layer l) const {
    return layers_[static_cast<int>(l)];
  }
  std::span<const Arc> switch_arcs() const { return switch_arcs_; }

  int node_count() const { return node_offset_[kLayerCount]; }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  int layer_node_count(Layer l) const { return layer(l).node_count(); }

  std::span<const Arc> arcs() const { return arcs_; }
  const Arc& arc(int id) const { return arcs_.at(id); }

  // Half-open dense id range of one arc kind.
  std::pair<int, int> arc_range(ArcKind kind) const;
  int arc_kind_count(ArcKind kind) const {
    auto [b, e] = arc_range(kind);
    return e - b;
  }

  int node_index(NodeRef n) const;
  NodeRef node_ref(int index) const;
  bool contains(NodeRef n) const;

  // Throws std::out_of_range for a node outside the graph.
  std::span<const int> out_arcs(NodeRef n) const;
  std::span<const int> in_arcs(NodeRef n) const;

  // Signed N x E incidence matrix: -1 at the tail, +1 at the head.
  Eigen::SparseMatrix<double> incidence_matrix() const;

 private:
  std::vector<LayeredNetwork> layers_;
  std::vector<Arc> switch_arcs_;
  std::vector<Arc> arcs_;
  int node_offset_[kLayerCount + 1] = {};
  int arc_offset_[5] = {};
  std::vector<int> out_start_, out_ids_, in_start_, in_ids_;
};

template <typename Node>
struct ConnectivityReport {
  bool strongly_connected = true;
  // (u, v) such that v is unreachable from u.
  std::optional<std::pair<Node, Node>> witness;
};

ConnectivityReport<int> check_strong_connectivity(const LayeredNetwork& net);
ConnectivityReport<NodeRef> check_strong_connectivity(const Supergraph& g);

// Replicates the road topology into walking and micromobility layers with
// the configured speeds and adds W<->M and W<->R switching arcs at every
// selected node. Throws std::invalid_argument for a road network that is not
// strongly connected or for non-positive speeds.
Supergraph build_supergraph(const LayeredNetwork& road_net,
                            const ScenarioConfig& config);

}  // namespace amod
