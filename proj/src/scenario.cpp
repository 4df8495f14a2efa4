#include "amod/scenario.hpp"

#include <map>
#include <stdexcept>
#include <string>

#include "amod/error.hpp"

namespace amod {

DemandSet::DemandSet(std::vector<Request> requests) {
  std::map<std::pair<NodeRef, NodeRef>, std::size_t> seen;
  for (const Request& r : requests) {
    if (r.origin.layer != Layer::kWalking ||
        r.destination.layer != Layer::kWalking) {
      throw std::invalid_argument("request endpoints must be walking nodes");
    }
    if (r.origin == r.destination) {
      throw std::invalid_argument("request origin equals destination");
    }
    if (!(r.rate > 0.0)) {
      throw std::invalid_argument("request rate must be positive");
    }
    auto [it, inserted] =
        seen.try_emplace({r.origin, r.destination}, requests_.size());
    if (inserted) {
      requests_.push_back(r);
    } else {
      requests_[it->second].rate += r.rate;
    }
    total_rate_ += r.rate;
  }
}

LayeredNetwork road_network_from_tntp(const tntp::Network& net,
                                      const ScenarioConfig& config) {
  std::vector<ArcSpec> specs;
  specs.reserve(net.links.size());
  for (const auto& l : net.links) {
    specs.push_back({l.init_node - 1, l.term_node - 1,
                     l.length * config.length_unit_to_km,
                     l.capacity * config.road_capacity_scale});
  }
  return make_layer(Layer::kRoad, net.node_count, specs, config.speeds.road);
}

DemandSet demand_from_trips(const tntp::Trips& trips, int node_count,
                            double demand_scale) {
  if (trips.zone_count != node_count) {
    throw DataError("trips file has " + std::to_string(trips.zone_count) +
                    " zones but the network has " + std::to_string(node_count) +
                    " nodes; zones must coincide with nodes");
  }
  if (!(demand_scale > 0.0)) {
    throw std::invalid_argument("demand_scale must be positive");
  }
  std::vector<Request> requests;
  for (int o = 0; o < trips.zone_count; ++o) {
    for (int d = 0; d < trips.zone_count; ++d) {
      const double f = trips.at(o, d);
      if (o == d || f <= 0.0) continue;
      requests.push_back({{Layer::kWalking, o}, {Layer::kWalking, d},
                          f * demand_scale});
    }
  }
  return DemandSet(std::move(requests));
}

Scenario build_scenario(const tntp::Network& net, const tntp::Trips& trips,
                        const ScenarioConfig& config) {
  config.validate();
  auto road = road_network_from_tntp(net, config);
  Supergraph g = build_supergraph(road, config);
  return {std::move(g),
          demand_from_trips(trips, net.node_count, config.demand_scale)};
}

Scenario load_scenario(const ScenarioConfig& config) {
  if (config.net_file.empty()) throw DataError("config has no net_file");
  if (config.trips_file.empty()) throw DataError("config has no trips_file");
  const auto net = tntp::read_net_file(config.net_file.string());
  const auto trips = tntp::read_trips_file(config.trips_file.string());
  try {
    return build_scenario(net, trips, config);
  } catch (const std::invalid_argument& e) {
    throw DataError(config.net_file.string() + ": " + e.what());
  }
}

}  // namespace amod
