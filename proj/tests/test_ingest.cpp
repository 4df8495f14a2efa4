#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "amod/config.hpp"
#include "amod/error.hpp"
#include "amod/scenario.hpp"
#include "amod/tntp.hpp"
#include "support.hpp"

namespace amod {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr const char* kOneLink =
    "<NUMBER OF NODES> 2\n<NUMBER OF LINKS> 1\n<END OF METADATA>\n"
    "1 2 100 1 1 0.15 4 0 0 1 ;\n";

TEST(ParseNet, SingleLink) {
  const auto net = tntp::parse_net(kOneLink);
  ASSERT_EQ(net.links.size(), 1u);
  EXPECT_EQ(net.node_count, 2);
  EXPECT_EQ(net.links[0].init_node, 1);
  EXPECT_EQ(net.links[0].term_node, 2);
  EXPECT_DOUBLE_EQ(net.links[0].capacity, 100.0);
  EXPECT_DOUBLE_EQ(net.links[0].b, 0.15);
  EXPECT_DOUBLE_EQ(net.links[0].power, 4.0);
}

TEST(ParseNet, MissingEndOfMetadata) {
  try {
    tntp::parse_net("<NUMBER OF NODES> 2\n<NUMBER OF LINKS> 1\n1 2 100 1 1 0.15 4 0 0 1 ;\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("END OF METADATA"), std::string::npos);
  }
}

TEST(ParseNet, MalformedRowsReportLine) {
  const std::string head = "<NUMBER OF NODES> 2\n<NUMBER OF LINKS> 1\n<END OF METADATA>\n";
  try {
    tntp::parse_net(head + "1 2 abc 1 1 0.15 4 0 0 1 ;\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
  EXPECT_THROW(tntp::parse_net(head + "1 1 100 1 1 0.15 4 0 0 1 ;\n"), ParseError);
  EXPECT_THROW(tntp::parse_net(head + "1 2 0 1 1 0.15 4 0 0 1 ;\n"), ParseError);
  EXPECT_THROW(tntp::parse_net(head + "1 3 10 1 1 0.15 4 0 0 1 ;\n"), ParseError);
  EXPECT_THROW(tntp::parse_net(head + "1 2 10 1 1 0.15 4 0 0 1\n"), ParseError);
  // declared link count disagrees
  EXPECT_THROW(tntp::parse_net(head), ParseError);
}

TEST(ParseNet, SiouxFallsCounts) {
  const auto net = tntp::read_net_file(test::data_path("SiouxFalls_net.tntp"));
  EXPECT_EQ(net.node_count, 24);
  EXPECT_EQ(net.links.size(), 76u);
  for (const auto& l : net.links) {
    EXPECT_NE(l.init_node, l.term_node);
    EXPECT_GT(l.capacity, 0.0);
    EXPECT_GE(l.length, 0.0);
  }
}

TEST(ParseNet, RoundTripIsLossless) {
  const auto text = slurp(test::data_path("SiouxFalls_net.tntp"));
  const auto net = tntp::parse_net(text);
  const auto again = tntp::parse_net(tntp::serialize_net(net));
  EXPECT_EQ(net, again);
  EXPECT_EQ(tntp::serialize_net(again), tntp::serialize_net(net));
}

TEST(ParseTrips, SingleEntryAndDiagonal) {
  const auto t = tntp::parse_trips(
      "<NUMBER OF ZONES> 2\n<TOTAL OD FLOW> 105\n<END OF METADATA>\nOrigin 1\n 1 : 5.0; 2 : 100.0;\n");
  EXPECT_EQ(t.zone_count, 2);
  EXPECT_DOUBLE_EQ(t.at(0, 1), 100.0);
  EXPECT_DOUBLE_EQ(t.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(t.at(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(t.dropped_diagonal, 5.0);
  EXPECT_DOUBLE_EQ(t.total(), 100.0);
}

TEST(ParseTrips, Malformed) {
  const std::string head = "<NUMBER OF ZONES> 2\n<TOTAL OD FLOW> 105\n<END OF METADATA>\n";
  EXPECT_THROW(tntp::parse_trips(head + "2 : 1.0;\n"), ParseError);
  EXPECT_THROW(tntp::parse_trips(head + "Origin 1\n 2 : -1.0;\n"), ParseError);
  EXPECT_THROW(tntp::parse_trips(head + "Origin 3\n"), ParseError);
  EXPECT_THROW(tntp::parse_trips(head + "Origin 1\n 2 = 1.0;\n"), ParseError);
}

TEST(ParseTrips, SiouxFallsTotal) {
  const auto t = tntp::read_trips_file(test::data_path("SiouxFalls_trips.tntp"));
  EXPECT_EQ(t.zone_count, 24);
  EXPECT_DOUBLE_EQ(t.declared_total, 360600.0);
  EXPECT_NEAR(t.total() + t.dropped_diagonal, t.declared_total, 1e-6);
}

TEST(BuildScenario, DemandScaling) {
  const auto net = tntp::parse_net(
      "<NUMBER OF NODES> 2\n<NUMBER OF LINKS> 2\n<END OF METADATA>\n"
      "1 2 100 1 1 0.15 4 0 0 1 ;\n2 1 100 1 1 0.15 4 0 0 1 ;\n");
  const auto trips = tntp::parse_trips(
      "<NUMBER OF ZONES> 2\n<TOTAL OD FLOW> 105\n<END OF METADATA>\nOrigin 1\n 2 : 100.0;\n");
  ScenarioConfig cfg = test::open_config();
  cfg.demand_scale = 0.1;
  const auto sc = build_scenario(net, trips, cfg);
  ASSERT_EQ(sc.demand.size(), 1u);
  EXPECT_DOUBLE_EQ(sc.demand.requests()[0].rate, 10.0);
}

TEST(BuildScenario, SiouxFalls) {
  const auto net = tntp::read_net_file(test::data_path("SiouxFalls_net.tntp"));
  const auto trips = tntp::read_trips_file(test::data_path("SiouxFalls_trips.tntp"));
  ScenarioConfig cfg = test::open_config();
  cfg.demand_scale = 0.25;
  const auto sc = build_scenario(net, trips, cfg);
  EXPECT_NEAR(sc.demand.total_rate(), 0.25 * trips.total(), 1e-9);
  EXPECT_EQ(sc.demand.size(), 528u);
  EXPECT_EQ(sc.graph.node_count(), 72);
  EXPECT_EQ(sc.graph.arc_count() - sc.graph.arc_kind_count(ArcKind::kSwitch), 228);
  EXPECT_EQ(sc.graph.arc_kind_count(ArcKind::kSwitch), 96);
  auto [b, e] = sc.graph.arc_range(ArcKind::kWalk);
  for (int a = b; a < e; ++a) {
    EXPECT_DOUBLE_EQ(sc.graph.arc(a).free_flow_time, sc.graph.arc(a).length / 3.0);
  }
  EXPECT_TRUE(check_strong_connectivity(sc.graph).strongly_connected);
}

TEST(BuildScenario, ZoneCountMismatch) {
  const auto net = tntp::parse_net(
      "<NUMBER OF NODES> 2\n<NUMBER OF LINKS> 2\n<END OF METADATA>\n"
      "1 2 100 1 1 0.15 4 0 0 1 ;\n2 1 100 1 1 0.15 4 0 0 1 ;\n");
  const auto trips = tntp::parse_trips("<NUMBER OF ZONES> 3\n<TOTAL OD FLOW> 0\n<END OF METADATA>\n");
  EXPECT_THROW(build_scenario(net, trips, test::open_config()), DataError);
}

TEST(DemandSet, MergesDuplicatesAndValidates) {
  const NodeRef a{Layer::kWalking, 0}, b{Layer::kWalking, 1};
  DemandSet d({{a, b, 2.0}, {a, b, 3.0}, {b, a, 1.0}});
  EXPECT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d.total_rate(), 6.0);
  EXPECT_DOUBLE_EQ(d.requests()[0].rate, 5.0);
  EXPECT_THROW(DemandSet({{a, a, 1.0}}), std::invalid_argument);
  EXPECT_THROW(DemandSet({{a, b, 0.0}}), std::invalid_argument);
  EXPECT_THROW(DemandSet({{a, {Layer::kRoad, 1}, 1.0}}), std::invalid_argument);
}

TEST(Config, JsonRoundTripAndErrors) {
  nlohmann::json doc = {{"net_file", "n.tntp"}, {"trips_file", "t.tntp"},
                        {"n_R", 100},           {"h_S", "inf"},
                        {"congestion_model", "pwl"}, {"pwl_segments", 8}};
  const auto c = config_from_json(doc, "/base");
  EXPECT_EQ(c.net_file, std::filesystem::path("/base/n.tntp"));
  EXPECT_DOUBLE_EQ(c.fleet_road, 100.0);
  EXPECT_TRUE(std::isinf(c.switch_capacity));
  EXPECT_EQ(c.congestion_model, CongestionModel::kPiecewiseBpr);
  const auto again = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));

  EXPECT_THROW(config_from_json({{"bogus", 1}}), DataError);
  EXPECT_THROW(config_from_json({{"n_R", -1}}), DataError);
  EXPECT_THROW(config_from_json({{"demand_scale", 0}}), DataError);
  EXPECT_THROW(config_from_json({{"pwl_segments", 0}}), DataError);
  EXPECT_THROW(config_from_json({{"congestion_model", "quadratic"}}), std::exception);
  EXPECT_THROW(load_config("/nonexistent/config.json"), DataError);
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"sioux_falls.json", "toy.json"}) {
    const auto c = load_config(test::data_path(name));
    EXPECT_TRUE(std::filesystem::exists(c.net_file)) << name;
    EXPECT_TRUE(std::filesystem::exists(c.trips_file)) << name;
    EXPECT_NO_THROW(load_scenario(c));
  }
}

}  // namespace
}  // namespace amod
