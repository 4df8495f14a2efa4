#include "amod/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace amod {

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::kWalking:
      return "walking";
    case Layer::kMicromobility:
      return "micromobility";
    case Layer::kRoad:
      return "road";
  }
  return "?";
}

ArcKind arc_kind_of(Layer layer) {
  switch (layer) {
    case Layer::kWalking:
      return ArcKind::kWalk;
    case Layer::kMicromobility:
      return ArcKind::kMicro;
    case Layer::kRoad:
      return ArcKind::kRoad;
  }
  return ArcKind::kWalk;
}

double free_flow_time(double length_km, double speed_kmh) {
  if (!(speed_kmh > 0.0) || !std::isfinite(speed_kmh)) {
    throw std::invalid_argument("free_flow_time: speed must be positive, got " +
                                std::to_string(speed_kmh));
  }
  if (!(length_km >= 0.0)) {
    throw std::invalid_argument("free_flow_time: negative length");
  }
  return length_km / speed_kmh;
}

LayeredNetwork::LayeredNetwork(Layer layer, int node_count,
                               std::vector<Arc> arcs)
    : layer_(layer), node_count_(node_count), arcs_(std::move(arcs)) {
  if (node_count_ < 0) throw std::invalid_argument("negative node count");
  const auto kind = arc_kind_of(layer_);
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    const Arc& a = arcs_[i];
    const std::string where = std::string(to_string(layer_)) + " arc " +
                              std::to_string(i) + ": ";
    if (a.tail.layer != layer_ || a.head.layer != layer_ || a.kind != kind) {
      throw std::invalid_argument(where + "does not belong to this layer");
    }
    if (a.tail.local_id < 0 || a.tail.local_id >= node_count_ ||
        a.head.local_id < 0 || a.head.local_id >= node_count_) {
      throw std::invalid_argument(where + "node id out of range");
    }
    if (a.tail == a.head) throw std::invalid_argument(where + "self loop");
    if (!(a.capacity > 0.0)) {
      throw std::invalid_argument(where + "capacity must be positive");
    }
    if (!(a.speed > 0.0)) {
      throw std::invalid_argument(where + "speed must be positive");
    }
    if (!(a.free_flow_time >= 0.0) || !std::isfinite(a.free_flow_time)) {
      throw std::invalid_argument(where + "invalid free-flow time");
    }
  }
}

LayeredNetwork make_layer(Layer layer, int node_count,
                          std::span<const ArcSpec> arcs, double speed) {
  std::vector<Arc> out;
  out.reserve(arcs.size());
  for (const auto& s : arcs) {
    Arc a;
    a.tail = {layer, s.tail};
    a.head = {layer, s.head};
    a.kind = arc_kind_of(layer);
    a.length = s.length;
    a.speed = speed;
    a.capacity = s.capacity;
    a.free_flow_time = free_flow_time(s.length, speed);
    out.push_back(a);
  }
  return LayeredNetwork(layer, node_count, std::move(out));
}

namespace {

int kind_slot(ArcKind k) { return static_cast<int>(k); }

bool switch_pair_allowed(Layer a, Layer b) {
  return (a == Layer::kWalking) != (b == Layer::kWalking);
}

}  // namespace

Supergraph::Supergraph(LayeredNetwork walking, LayeredNetwork micro,
                       LayeredNetwork road, std::vector<Arc> switch_arcs)
    : switch_arcs_(std::move(switch_arcs)) {
  if (walking.layer() != Layer::kWalking ||
      micro.layer() != Layer::kMicromobility || road.layer() != Layer::kRoad) {
    throw std::invalid_argument("Supergraph: layers passed in wrong order");
  }
  layers_.push_back(std::move(walking));
  layers_.push_back(std::move(micro));
  layers_.push_back(std::move(road));

  for (int l = 0; l < kLayerCount; ++l) {
    node_offset_[l + 1] = node_offset_[l] + layers_[l].node_count();
  }
  for (std::size_t i = 0; i < switch_arcs_.size(); ++i) {
    const Arc& a = switch_arcs_[i];
    const std::string where = "switch arc " + std::to_string(i) + ": ";
    if (a.kind != ArcKind::kSwitch || a.tail.layer == a.head.layer) {
      throw std::invalid_argument(where + "must join two different layers");
    }
    if (!switch_pair_allowed(a.tail.layer, a.head.layer)) {
      throw std::invalid_argument(
          where + "micromobility and road layers cannot be joined directly");
    }
    if (!contains(a.tail) || !contains(a.head)) {
      throw std::invalid_argument(where + "node out of range");
    }
    if (a.length != 0.0) throw std::invalid_argument(where + "nonzero length");
    if (!(a.capacity > 0.0)) {
      throw std::invalid_argument(where + "capacity must be positive");
    }
    if (!(a.free_flow_time >= 0.0) || !std::isfinite(a.free_flow_time)) {
      throw std::invalid_argument(where + "invalid switching time");
    }
  }

  arc_offset_[0] = 0;
  for (int l = 0; l < kLayerCount; ++l) {
    const auto arcs = layers_[l].arcs();
    arcs_.insert(arcs_.end(), arcs.begin(), arcs.end());
    arc_offset_[l + 1] = static_cast<int>(arcs_.size());
  }
  arcs_.insert(arcs_.end(), switch_arcs_.begin(), switch_arcs_.end());
  arc_offset_[4] = static_cast<int>(arcs_.size());

  // CSR adjacency in both directions.
  const int n = node_count();
  out_start_.assign(n + 1, 0);
  in_start_.assign(n + 1, 0);
  for (const Arc& a : arcs_) {
    ++out_start_[node_index(a.tail) + 1];
    ++in_start_[node_index(a.head) + 1];
  }
  for (int v = 0; v < n; ++v) {
    out_start_[v + 1] += out_start_[v];
    in_start_[v + 1] += in_start_[v];
  }
  out_ids_.resize(arcs_.size());
  in_ids_.resize(arcs_.size());
  std::vector<int> out_fill(out_start_.begin(), out_start_.end() - 1);
  std::vector<int> in_fill(in_start_.begin(), in_start_.end() - 1);
  for (int id = 0; id < arc_count(); ++id) {
    out_ids_[out_fill[node_index(arcs_[id].tail)]++] = id;
    in_ids_[in_fill[node_index(arcs_[id].head)]++] = id;
  }
}

std::pair<int, int> Supergraph::arc_range(ArcKind kind) const {
  const int s = kind_slot(kind);
  return {arc_offset_[s], arc_offset_[s + 1]};
}

bool Supergraph::contains(NodeRef n) const {
  const int l = static_cast<int>(n.layer);
  return l >= 0 && l < kLayerCount && n.local_id >= 0 &&
         n.local_id < layers_.at(l).node_count();
}

int Supergraph::node_index(NodeRef n) const {
  if (!contains(n)) throw std::out_of_range("node outside supergraph");
  return node_offset_[static_cast<int>(n.layer)] + n.local_id;
}

NodeRef Supergraph::node_ref(int index) const {
  if (index < 0 || index >= node_count()) {
    throw std::out_of_range("node index outside supergraph");
  }
  int l = 0;
  while (index >= node_offset_[l + 1]) ++l;
  return {static_cast<Layer>(l), index - node_offset_[l]};
}

std::span<const int> Supergraph::out_arcs(NodeRef n) const {
  const int v = node_index(n);
  return std::span<const int>(out_ids_).subspan(
      out_start_[v], out_start_[v + 1] - out_start_[v]);
}

std::span<const int> Supergraph::in_arcs(NodeRef n) const {
  const int v = node_index(n);
  return std::span<const int>(in_ids_).subspan(in_start_[v],
                                               in_start_[v + 1] - in_start_[v]);
}

Eigen::SparseMatrix<double> Supergraph::incidence_matrix() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * arcs_.size());
  for (int id = 0; id < arc_count(); ++id) {
    t.emplace_back(node_index(arcs_[id].tail), id, -1.0);
    t.emplace_back(node_index(arcs_[id].head), id, 1.0);
  }
  Eigen::SparseMatrix<double> b(node_count(), arc_count());
  b.setFromTriplets(t.begin(), t.end());
  return b;
}

namespace {

// Forward/backward reachability from node 0 decides strong connectivity and
// yields a witness pair when it fails.
std::optional<std::pair<int, int>> unreachable_pair(
    int n, std::span<const std::pair<int, int>> edges) {
  if (n <= 1) return std::nullopt;
  std::vector<std::vector<int>> fwd(n), bwd(n);
  for (auto [u, v] : edges) {
    fwd[u].push_back(v);
    bwd[v].push_back(u);
  }
  auto reach = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return seen;
  };
  const auto from_root = reach(fwd);
  for (int v = 0; v < n; ++v) {
    if (!from_root[v]) return std::pair{0, v};
  }
  const auto to_root = reach(bwd);
  for (int u = 0; u < n; ++u) {
    if (!to_root[u]) return std::pair{u, 0};
  }
  return std::nullopt;
}

}  // namespace

ConnectivityReport<int> check_strong_connectivity(const LayeredNetwork& net) {
  std::vector<std::pair<int, int>> edges;
  for (const Arc& a : net.arcs()) {
    edges.emplace_back(a.tail.local_id, a.head.local_id);
  }
  ConnectivityReport<int> r;
  r.witness = unreachable_pair(net.node_count(), edges);
  r.strongly_connected = !r.witness.has_value();
  return r;
}

ConnectivityReport<NodeRef> check_strong_connectivity(const Supergraph& g) {
  std::vector<std::pair<int, int>> edges;
  for (const Arc& a : g.arcs()) {
    edges.emplace_back(g.node_index(a.tail), g.node_index(a.head));
  }
  ConnectivityReport<NodeRef> r;
  if (auto w = unreachable_pair(g.node_count(), edges)) {
    r.strongly_connected = false;
    r.witness = std::pair{g.node_ref(w->first), g.node_ref(w->second)};
  }
  return r;
}

namespace {

LayeredNetwork replicate(const LayeredNetwork& road, Layer layer,
                         double speed) {
  std::vector<Arc> arcs;
  arcs.reserve(road.arcs().size());
  for (const Arc& r : road.arcs()) {
    Arc a = r;
    a.tail.layer = layer;
    a.head.layer = layer;
    a.kind = arc_kind_of(layer);
    a.speed = speed;
    a.capacity = kUnlimited;
    a.free_flow_time = free_flow_time(r.length, speed);
    arcs.push_back(a);
  }
  return LayeredNetwork(layer, road.node_count(), std::move(arcs));
}

Arc make_switch(NodeRef from, NodeRef to, const ScenarioConfig& cfg) {
  Arc a;
  a.tail = from;
  a.head = to;
  a.kind = ArcKind::kSwitch;
  a.length = 0.0;
  a.speed = 0.0;
  a.capacity = cfg.switch_capacity;
  a.free_flow_time = cfg.switching_time;
  return a;
}

}  // namespace

Supergraph build_supergraph(const LayeredNetwork& road_net,
                            const ScenarioConfig& config) {
  if (road_net.layer() != Layer::kRoad) {
    throw std::invalid_argument("build_supergraph: expected a road layer");
  }
  if (!(config.speeds.walking > 0.0) || !(config.speeds.micromobility > 0.0) ||
      !(config.speeds.road > 0.0)) {
    throw std::invalid_argument("build_supergraph: speeds must be positive");
  }
  if (!(config.switching_time >= 0.0) ||
      !std::isfinite(config.switching_time)) {
    throw std::invalid_argument("build_supergraph: invalid switching time");
  }
  if (!(config.switch_capacity > 0.0)) {
    throw std::invalid_argument(
        "build_supergraph: switching capacity must be positive");
  }
  for (const Arc& a : road_net.arcs()) {
    if (!(a.speed > 0.0)) {
      throw std::invalid_argument("build_supergraph: road arc with speed <= 0");
    }
  }
  if (auto conn = check_strong_connectivity(road_net);
      !conn.strongly_connected) {
    throw std::invalid_argument(
        "build_supergraph: road network is not strongly connected (node " +
        std::to_string(conn.witness->second + 1) + " unreachable from node " +
        std::to_string(conn.witness->first + 1) + ")");
  }

  const int n = road_net.node_count();
  std::vector<char> switching(n, config.switching_nodes ? 0 : 1);
  if (config.switching_nodes) {
    for (int id : *config.switching_nodes) {
      if (id < 1 || id > n) {
        throw std::invalid_argument("switching node id out of range: " +
                                    std::to_string(id));
      }
      switching[id - 1] = 1;
    }
  }
  std::vector<Arc> switches;
  for (int v = 0; v < n; ++v) {
    if (!switching[v]) continue;
    const NodeRef w{Layer::kWalking, v}, m{Layer::kMicromobility, v},
        r{Layer::kRoad, v};
    switches.push_back(make_switch(w, m, config));
    switches.push_back(make_switch(m, w, config));
    switches.push_back(make_switch(w, r, config));
    switches.push_back(make_switch(r, w, config));
  }

  Supergraph g(replicate(road_net, Layer::kWalking, config.speeds.walking),
               replicate(road_net, Layer::kMicromobility,
                         config.speeds.micromobility),
               road_net, std::move(switches));
  if (auto conn = check_strong_connectivity(g); !conn.strongly_connected) {
    throw std::invalid_argument(
        "build_supergraph: supergraph is not strongly connected (no switching "
        "nodes?)");
  }
  return g;
}

}  // namespace amod
