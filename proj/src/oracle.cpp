#include "amod/oracle.hpp"

#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>

namespace amod {

LayerMask::LayerMask(std::initializer_list<Layer> layers) {
  for (Layer l : layers) bits_ |= 1u << static_cast<int>(l);
}

std::vector<double> shortest_time(const Supergraph& g, NodeRef source,
                                  LayerMask mask) {
  if (!g.contains(source)) throw std::out_of_range("shortest_time: bad source");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.node_count(), inf);
  if (!mask.contains(source.layer)) return dist;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const int s = g.node_index(source);
  dist[s] = 0.0;
  heap.emplace(0.0, s);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (int a : g.out_arcs(g.node_ref(u))) {
      const Arc& arc = g.arc(a);
      if (!mask.contains(arc.head.layer)) continue;
      const int v = g.node_index(arc.head);
      const double nd = d + arc.free_flow_time;
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return dist;
}

double uncapacitated_optimum(const Supergraph& g, const DemandSet& demand,
                             LayerMask mask) {
  std::map<NodeRef, std::vector<double>> cache;
  double total = 0.0;
  for (const Request& r : demand.requests()) {
    auto it = cache.find(r.origin);
    if (it == cache.end()) {
      it = cache.emplace(r.origin, shortest_time(g, r.origin, mask)).first;
    }
    const double d = it->second[g.node_index(r.destination)];
    if (!std::isfinite(d)) {
      throw std::runtime_error("no path from walking node " +
                               std::to_string(r.origin.local_id + 1) + " to " +
                               std::to_string(r.destination.local_id + 1));
    }
    total += r.rate * d;
  }
  return total;
}

}  // namespace amod
