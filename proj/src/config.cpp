#include "amod/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "amod/error.hpp"

namespace amod {

using nlohmann::json;

std::string_view to_string(CongestionModel model) {
  return model == CongestionModel::kThreshold ? "threshold" : "pwl";
}

CongestionModel congestion_model_from_string(std::string_view name) {
  if (name == "threshold") return CongestionModel::kThreshold;
  if (name == "pwl" || name == "piecewise_bpr") {
    return CongestionModel::kPiecewiseBpr;
  }
  throw std::invalid_argument("unknown congestion model '" +
                              std::string(name) + "'");
}

void ScenarioConfig::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument(std::string(name) + " must be >= 0");
    }
  };
  nonneg(fleet_road, "n_R");
  nonneg(fleet_micro, "n_M");
  nonneg(beta_node, "beta_node");
  nonneg(beta_total, "beta_total");
  if (!(switch_capacity > 0.0)) {
    throw std::invalid_argument("h_S must be > 0");
  }
  if (!(speeds.walking > 0.0) || !(speeds.micromobility > 0.0) ||
      !(speeds.road > 0.0)) {
    throw std::invalid_argument("speeds must be > 0");
  }
  if (!(length_unit_to_km > 0.0) || !std::isfinite(length_unit_to_km)) {
    throw std::invalid_argument("length_unit_to_km must be > 0");
  }
  if (!(switching_time >= 0.0) || !std::isfinite(switching_time)) {
    throw std::invalid_argument("switching_time_h must be finite and >= 0");
  }
  if (!(demand_scale > 0.0) || !std::isfinite(demand_scale)) {
    throw std::invalid_argument("demand_scale must be > 0");
  }
  if (pwl_segments < 1) throw std::invalid_argument("pwl_segments must be >= 1");
  if (!(pwl_range_factor > 0.0)) {
    throw std::invalid_argument("pwl_range_factor must be > 0");
  }
}

namespace {

double read_quantity(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "unlimited") return kUnlimited;
  }
  throw DataError("config key '" + key + "': expected a number or \"inf\"");
}

json write_quantity(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

std::filesystem::path resolve(const std::filesystem::path& p,
                              const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

ScenarioConfig config_from_json(const json& doc,
                                const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw DataError("config must be a JSON object");
  ScenarioConfig c;
  static const std::set<std::string> known = {
      "net_file",        "trips_file",
      "speed_walking_kmh", "speed_micromobility_kmh",
      "speed_road_kmh",  "length_unit_to_km",
      "n_R",             "n_M",
      "beta_node",       "beta_total",
      "h_S",             "switching_time_h",
      "demand_scale",    "congestion_model",
      "pwl_segments",    "pwl_range_factor",
      "pwl_keep_capacity", "include_rebalancing_in_fleet",
      "aggregate_commodities", "minimize_rebalancing",
      "time_weighted_rebalancing", "switching_nodes",
      "rebalancing_nodes", "road_capacity_scale"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw DataError("unknown config key '" + key + "'");
  }
  try {
    if (doc.contains("net_file")) {
      c.net_file = resolve(doc["net_file"].get<std::string>(), base_dir);
    }
    if (doc.contains("trips_file")) {
      c.trips_file = resolve(doc["trips_file"].get<std::string>(), base_dir);
    }
    auto num = [&](const char* key, double& out) {
      if (doc.contains(key)) out = read_quantity(doc[key], key);
    };
    num("speed_walking_kmh", c.speeds.walking);
    num("speed_micromobility_kmh", c.speeds.micromobility);
    num("speed_road_kmh", c.speeds.road);
    num("length_unit_to_km", c.length_unit_to_km);
    num("road_capacity_scale", c.road_capacity_scale);
    num("n_R", c.fleet_road);
    num("n_M", c.fleet_micro);
    num("beta_node", c.beta_node);
    num("beta_total", c.beta_total);
    num("h_S", c.switch_capacity);
    num("switching_time_h", c.switching_time);
    num("demand_scale", c.demand_scale);
    num("pwl_range_factor", c.pwl_range_factor);
    if (doc.contains("congestion_model")) {
      c.congestion_model =
          congestion_model_from_string(doc["congestion_model"].get<std::string>());
    }
    if (doc.contains("pwl_segments")) c.pwl_segments = doc["pwl_segments"].get<int>();
    auto flag = [&](const char* key, bool& out) {
      if (doc.contains(key)) out = doc[key].get<bool>();
    };
    flag("pwl_keep_capacity", c.pwl_keep_capacity);
    flag("include_rebalancing_in_fleet", c.include_rebalancing_in_fleet);
    flag("aggregate_commodities", c.aggregate_commodities);
    flag("minimize_rebalancing", c.minimize_rebalancing);
    flag("time_weighted_rebalancing", c.time_weighted_rebalancing);
    if (doc.contains("switching_nodes")) {
      c.switching_nodes = doc["switching_nodes"].get<std::vector<int>>();
    }
    if (doc.contains("rebalancing_nodes")) {
      c.rebalancing_nodes = doc["rebalancing_nodes"].get<std::vector<int>>();
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc, path.parent_path());
}

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["net_file"] = c.net_file.string();
  j["trips_file"] = c.trips_file.string();
  j["speed_walking_kmh"] = c.speeds.walking;
  j["speed_micromobility_kmh"] = c.speeds.micromobility;
  j["speed_road_kmh"] = c.speeds.road;
  j["length_unit_to_km"] = c.length_unit_to_km;
  j["road_capacity_scale"] = write_quantity(c.road_capacity_scale);
  j["n_R"] = write_quantity(c.fleet_road);
  j["n_M"] = write_quantity(c.fleet_micro);
  j["beta_node"] = write_quantity(c.beta_node);
  j["beta_total"] = write_quantity(c.beta_total);
  j["h_S"] = write_quantity(c.switch_capacity);
  j["switching_time_h"] = c.switching_time;
  j["demand_scale"] = c.demand_scale;
  j["congestion_model"] = std::string(to_string(c.congestion_model));
  j["pwl_segments"] = c.pwl_segments;
  j["pwl_range_factor"] = c.pwl_range_factor;
  j["pwl_keep_capacity"] = c.pwl_keep_capacity;
  j["include_rebalancing_in_fleet"] = c.include_rebalancing_in_fleet;
  j["aggregate_commodities"] = c.aggregate_commodities;
  j["minimize_rebalancing"] = c.minimize_rebalancing;
  j["time_weighted_rebalancing"] = c.time_weighted_rebalancing;
  if (c.switching_nodes) j["switching_nodes"] = *c.switching_nodes;
  if (c.rebalancing_nodes) j["rebalancing_nodes"] = *c.rebalancing_nodes;
  return j;
}

}  // namespace amod
