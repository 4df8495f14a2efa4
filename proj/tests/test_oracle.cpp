#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "amod/oracle.hpp"
#include "support.hpp"

namespace amod {
namespace {

TEST(ShortestTime, SingleArc) {
  // 13.5 km at 45 km/h is 0.3 h
  const ArcSpec one[] = {{0, 1, 13.5, 10.0}};
  const auto road = make_layer(Layer::kRoad, 2, one, 45.0);
  Supergraph g(LayeredNetwork(Layer::kWalking, 0, {}),
               LayeredNetwork(Layer::kMicromobility, 0, {}), road, {});
  const auto t = shortest_time(g, {Layer::kRoad, 0});
  EXPECT_NEAR(t[g.node_index({Layer::kRoad, 1})], 0.3, 1e-15);
  EXPECT_EQ(t[g.node_index({Layer::kRoad, 0})], 0.0);
  EXPECT_TRUE(std::isinf(shortest_time(g, {Layer::kRoad, 1})[g.node_index({Layer::kRoad, 0})]));
}

TEST(ShortestTime, MaskRestrictsLayers) {
  const auto g = build_supergraph(test::road_ring(6, 3.0), test::open_config());
  const NodeRef o{Layer::kWalking, 0};
  const auto walk = shortest_time(g, o, {Layer::kWalking});
  const auto all = shortest_time(g, o);
  const int far = g.node_index({Layer::kWalking, 3});
  EXPECT_NEAR(walk[far], 9.0 / 3.0, 1e-12);
  EXPECT_NEAR(all[far], 9.0 / 45.0 + 2.0 / 60.0, 1e-12);
  EXPECT_TRUE(std::isinf(walk[g.node_index({Layer::kRoad, 3})]));
}

// Brute-force all-pairs reference: Bellman-Ford relaxation to a fixpoint.
std::vector<double> bellman_ford(const Supergraph& g, int src) {
  std::vector<double> d(g.node_count(), std::numeric_limits<double>::infinity());
  d[src] = 0.0;
  for (int pass = 0; pass < g.node_count(); ++pass) {
    for (const Arc& a : g.arcs()) {
      const int u = g.node_index(a.tail), v = g.node_index(a.head);
      d[v] = std::min(d[v], d[u] + a.free_flow_time);
    }
  }
  return d;
}

TEST(ShortestTime, AgreesWithBellmanFord) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = test::random_instance(rng);
    const auto g = build_supergraph(inst.road, inst.config);
    for (int s = 0; s < g.node_count(); s += 3) {
      const auto a = shortest_time(g, g.node_ref(s));
      const auto b = bellman_ford(g, s);
      for (int v = 0; v < g.node_count(); ++v) EXPECT_NEAR(a[v], b[v], 1e-12);
    }
  }
}

TEST(UncapacitatedOptimum, SingleRequest) {
  const auto g = build_supergraph(test::road_ring(4, 3.0), test::open_config());
  const NodeRef o{Layer::kWalking, 0}, d{Layer::kWalking, 1};
  const double t = shortest_time(g, o)[g.node_index(d)];
  EXPECT_NEAR(uncapacitated_optimum(g, DemandSet({{o, d, 2.5}})), 2.5 * t, 1e-15);
}

TEST(UncapacitatedOptimum, UnreachableThrows) {
  const auto g = build_supergraph(test::road_ring(4, 3.0), test::open_config());
  const NodeRef o{Layer::kWalking, 0}, d{Layer::kWalking, 1};
  // nothing usable without the walking layer
  EXPECT_THROW(uncapacitated_optimum(g, DemandSet({{o, d, 1.0}}), {Layer::kRoad}),
               std::runtime_error);
}

}  // namespace
}  // namespace amod
