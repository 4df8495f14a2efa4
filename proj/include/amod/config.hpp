#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace amod {

inline constexpr double kUnlimited = std::numeric_limits<double>::infinity();

enum class CongestionModel { kThreshold, kPiecewiseBpr };

std::string_view to_string(CongestionModel model);
CongestionModel congestion_model_from_string(std::string_view name);

struct LayerSpeeds {
  double walking = 3.0;  // km/h
  double micromobility = 15.0;
  double road = 45.0;
};

// Everything that parameterizes one scenario. Rates are per hour, times in
// hours, fleet sizes in vehicles (vehicle-hours per hour).
struct ScenarioConfig {
  std::filesystem::path net_file;
  std::filesystem::path trips_file;

  LayerSpeeds speeds;
  double length_unit_to_km = 1.0;
  double road_capacity_scale = 1.0;  // multiplies every TNTP capacity

  double fleet_road = kUnlimited;      // n_R
  double fleet_micro = kUnlimited;     // n_M
  double beta_node = kUnlimited;       // per-node micromobility rebalancing cap
  double beta_total = kUnlimited;      // system-wide micromobility rebalancing cap
  double switch_capacity = kUnlimited; // h_S, per switching arc
  double switching_time = 1.0 / 60.0;  // hours per boarding/alighting
  double demand_scale = 0.1;

  CongestionModel congestion_model = CongestionModel::kThreshold;
  int pwl_segments = 4;
  double pwl_range_factor = 2.0;  // tangent points cover [0, factor * h_R)
  bool pwl_keep_capacity = false;

  bool include_rebalancing_in_fleet = false;
  bool aggregate_commodities = true;
  // Second pass that picks, among optimal routings, the one with the least
  // rebalancing flow. Keeps reported rebalancing totals well defined.
  bool minimize_rebalancing = true;
  bool time_weighted_rebalancing = false;

  // 1-based node ids; empty optional means every node.
  std::optional<std::vector<int>> switching_nodes;
  std::optional<std::vector<int>> rebalancing_nodes;

  // Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

// Reads a flat JSON document. Relative file paths are resolved against the
// directory of `path`. Unknown keys are rejected with DataError.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig config_from_json(const nlohmann::json& doc,
                                const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const ScenarioConfig& cfg);

}  // namespace amod
