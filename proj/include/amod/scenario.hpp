#pragma once

#include <vector>

#include "amod/config.hpp"
#include "amod/graph.hpp"
#include "amod/tntp.hpp"

namespace amod {

// One travel request; origin and destination live on the walking layer.
struct Request {
  NodeRef origin;
  NodeRef destination;
  double rate = 0.0;  // requests per hour
};

class DemandSet {
 public:
  DemandSet() = default;
  // Validates each request and merges duplicate (origin, destination) pairs
  // by adding their rates. Throws std::invalid_argument.
  explicit DemandSet(std::vector<Request> requests);

  const std::vector<Request>& requests() const { return requests_; }
  std::size_t size() const { return requests_.size(); }
  double total_rate() const { return total_rate_; }

 private:
  std::vector<Request> requests_;
  double total_rate_ = 0.0;
};

struct Scenario {
  Supergraph graph;
  DemandSet demand;
};

// Road layer from parsed TNTP links: length scaled to km, the configured
// road speed, TNTP capacity as h_R.
LayeredNetwork road_network_from_tntp(const tntp::Network& net,
                                      const ScenarioConfig& config);

// Zones map one-to-one onto nodes; a trips file whose zone count differs
// from the network's node count is rejected.
DemandSet demand_from_trips(const tntp::Trips& trips, int node_count,
                            double demand_scale);

Scenario build_scenario(const tntp::Network& net, const tntp::Trips& trips,
                        const ScenarioConfig& config);

// Reads config.net_file / config.trips_file and builds the scenario.
Scenario load_scenario(const ScenarioConfig& config);

}  // namespace amod
