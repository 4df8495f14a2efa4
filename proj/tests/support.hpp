#pragma once

#include <random>
#include <string>
#include <vector>

#include "amod/config.hpp"
#include "amod/graph.hpp"
#include "amod/scenario.hpp"

namespace amod::test {

inline std::string data_path(const std::string& name) {
  return std::string(AMOD_DATA_DIR) + "/" + name;
}

// Generous limits everywhere; tests tighten what they need.
inline ScenarioConfig open_config() {
  ScenarioConfig c;
  c.demand_scale = 1.0;
  c.fleet_road = 1e6;
  c.fleet_micro = 1e6;
  c.beta_node = 1e6;
  c.beta_total = 1e6;
  c.switch_capacity = 1e6;
  return c;
}

// Bidirectional road ring 0 -> 1 -> ... -> n-1 -> 0.
inline LayeredNetwork road_ring(int n, double length, double capacity = 1e6) {
  std::vector<ArcSpec> specs;
  for (int v = 0; v < n; ++v) {
    const int w = (v + 1) % n;
    specs.push_back({v, w, length, capacity});
    if (n > 2) specs.push_back({w, v, length, capacity});
  }
  return make_layer(Layer::kRoad, n, specs, ScenarioConfig{}.speeds.road);
}

struct RandomInstance {
  LayeredNetwork road;
  DemandSet demand;
  ScenarioConfig config;
};

// Strongly connected road net on <= max_nodes nodes (ring plus chords) and
// <= max_requests requests; limits drawn so that some of them bind.
inline RandomInstance random_instance(std::mt19937& rng, int max_nodes = 8,
                                      int max_requests = 6) {
  std::uniform_int_distribution<int> nd(3, max_nodes);
  const int n = nd(rng);
  std::uniform_real_distribution<double> len(0.5, 4.0);
  std::uniform_real_distribution<double> cap(2.0, 20.0);
  std::vector<ArcSpec> specs;
  for (int v = 0; v < n; ++v) {
    const int w = (v + 1) % n;
    specs.push_back({v, w, len(rng), cap(rng)});
    specs.push_back({w, v, len(rng), cap(rng)});
  }
  std::uniform_int_distribution<int> node(0, n - 1);
  for (int k = 0; k < n / 2; ++k) {
    const int a = node(rng), b = node(rng);
    if (a == b || (a + 1) % n == b || (b + 1) % n == a) continue;
    specs.push_back({a, b, len(rng), cap(rng)});
  }
  std::uniform_int_distribution<int> nr(1, max_requests);
  std::uniform_real_distribution<double> rate(0.5, 8.0);
  std::vector<Request> reqs;
  const int r = nr(rng);
  while (static_cast<int>(reqs.size()) < r) {
    const int o = node(rng), d = node(rng);
    if (o == d) continue;
    reqs.push_back({{Layer::kWalking, o}, {Layer::kWalking, d}, rate(rng)});
  }
  ScenarioConfig c = open_config();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  c.fleet_road = 0.5 + 3.0 * u(rng);
  c.fleet_micro = 0.5 + 3.0 * u(rng);
  c.beta_node = 2.0 * u(rng);
  c.beta_total = 4.0 * u(rng);
  c.switch_capacity = 10.0 + 20.0 * u(rng);
  return {make_layer(Layer::kRoad, n, specs, c.speeds.road),
          DemandSet(std::move(reqs)), c};
}

}  // namespace amod::test
