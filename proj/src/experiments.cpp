#include "amod/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "amod/error.hpp"
#include "amod/model.hpp"
#include "amod/scenario.hpp"

namespace amod {

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kFleetRoad:
      return "n_R";
    case SweepParameter::kFleetMicro:
      return "n_M";
    case SweepParameter::kBetaNode:
      return "beta_node";
    case SweepParameter::kBetaTotal:
      return "beta_total";
    case SweepParameter::kSwitchCapacity:
      return "h_S";
  }
  return "?";
}

SweepParameter sweep_parameter_from_string(std::string_view name) {
  for (auto p : {SweepParameter::kFleetRoad, SweepParameter::kFleetMicro,
                 SweepParameter::kBetaNode, SweepParameter::kBetaTotal,
                 SweepParameter::kSwitchCapacity}) {
    if (name == to_string(p)) return p;
  }
  throw std::invalid_argument("unknown sweep parameter '" + std::string(name) +
                              "' (expected n_R, n_M, beta_node, beta_total, h_S)");
}

void apply(ScenarioConfig& c, SweepParameter p, double value) {
  switch (p) {
    case SweepParameter::kFleetRoad:
      c.fleet_road = value;
      break;
    case SweepParameter::kFleetMicro:
      c.fleet_micro = value;
      break;
    case SweepParameter::kBetaNode:
      c.beta_node = value;
      break;
    case SweepParameter::kBetaTotal:
      c.beta_total = value;
      break;
    case SweepParameter::kSwitchCapacity:
      c.switch_capacity = value;
      break;
  }
}

namespace {

double parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s == "inf") return kUnlimited;
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> parse_values(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step");
    const double a = parse_number(parts[0]);
    const double b = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0) || !std::isfinite(a) || !std::isfinite(b) || b < a) {
      throw std::invalid_argument("range needs finite start <= stop and step > 0");
    }
    const auto n = static_cast<long>(std::floor((b - a) / step * (1 + 1e-12))) + 1;
    for (long i = 0; i < n; ++i) out.push_back(a + static_cast<double>(i) * step);
  } else {
    for (auto part : split(text, ',')) out.push_back(parse_number(part));
  }
  for (double v : out) {
    if (!(v >= 0.0)) throw std::invalid_argument("sweep values must be >= 0");
  }
  return out;
}

SolveOptions solve_options(const ScenarioConfig& config) {
  SolveOptions o;
  o.minimize_rebalancing = config.minimize_rebalancing;
  o.time_weighted_rebalancing = config.time_weighted_rebalancing;
  return o;
}

RunOutcome run_scenario(const ScenarioConfig& config) {
  const auto net = tntp::read_net_file(config.net_file.string());
  const auto trips = tntp::read_trips_file(config.trips_file.string());
  return run_scenario(net, trips, config);
}

RunOutcome run_scenario(const tntp::Network& net, const tntp::Trips& trips,
                        const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  Scenario sc = [&] {
    try {
      return build_scenario(net, trips, config);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    }
  }();
  out.total_demand = sc.demand.total_rate();
  LinearModel model = [&] {
    try {
      return build_lp(sc.graph, sc.demand, config);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    }
  }();
  out.solution = solve(model, sc.graph, solve_options(config));
  out.status = out.solution.status;
  if (out.solution.optimal()) {
    out.report = verify(out.solution, model);
    try {
      out.metrics = compute_metrics(out.solution, sc.graph, config, out.total_demand);
      out.ok = out.report.ok();
      if (!out.ok) out.error = "verification failed";
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  } else {
    out.error = std::string(lp::to_string(out.status));
    if (!out.solution.message.empty()) out.error += ": " + out.solution.message;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, SweepParameter p,
                            std::vector<double> values, int workers) {
  const auto net = tntp::read_net_file(base.net_file.string());
  const auto trips = tntp::read_trips_file(base.trips_file.string());
  return sweep(net, trips, base, p, std::move(values), workers);
}

std::vector<SweepRow> sweep(const tntp::Network& net, const tntp::Trips& trips,
                            const ScenarioConfig& base, SweepParameter p,
                            std::vector<double> values, int workers) {
  std::sort(values.begin(), values.end());
  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      rows[i].value = values[i];
      ScenarioConfig cfg = base;
      apply(cfg, p, values[i]);
      try {
        rows[i].outcome = run_scenario(net, trips, cfg);
      } catch (const std::exception& e) {
        rows[i].outcome.error = e.what();
      }
    }
  };
  const int n = std::clamp(workers, 1, std::max<int>(1, static_cast<int>(rows.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

std::optional<std::size_t> steady_state_index(std::span<const double> series,
                                              double tolerance) {
  if (series.size() < 2) return std::nullopt;
  std::optional<std::size_t> knee;
  for (std::size_t i = series.size() - 1; i > 0; --i) {
    const double rel = std::abs(series[i] - series[i - 1]) /
                       std::max(std::abs(series[i - 1]), 1e-300);
    if (!(rel < tolerance)) break;
    knee = i - 1;
  }
  return knee;
}

void write_sweep_csv(std::ostream& out, SweepParameter p,
                     std::span<const SweepRow> rows) {
  out << to_string(p) << ",status,ok," << metrics_csv_header() << ",seconds\n";
  for (const SweepRow& r : rows) {
    char v[64];
    std::snprintf(v, sizeof v, "%.17g", r.value);
    out << v << ',' << lp::to_string(r.outcome.status) << ','
        << (r.outcome.ok ? 1 : 0) << ',';
    if (r.outcome.solution.optimal()) {
      out << to_csv_row(r.outcome.metrics);
    } else {
      out << ",,,,,,";
    }
    std::snprintf(v, sizeof v, "%.3f", r.outcome.seconds);
    out << ',' << v << '\n';
  }
}

nlohmann::json to_json(const RunOutcome& o) {
  nlohmann::json j;
  j["status"] = std::string(lp::to_string(o.status));
  j["ok"] = o.ok;
  j["total_demand"] = o.total_demand;
  j["seconds"] = o.seconds;
  if (o.solution.optimal()) {
    j["metrics"] = to_json(o.metrics);
    j["verify"] = to_json(o.report);
    j["relative_gap"] = o.solution.relative_gap;
  }
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

nlohmann::json sweep_sidecar(const ScenarioConfig& base, SweepParameter p,
                             std::span<const SweepRow> rows) {
  nlohmann::json j;
  j["parameter"] = std::string(to_string(p));
  j["rows"] = nlohmann::json::array();
  std::vector<double> t_avg;
  bool all_ok = true;
  for (const SweepRow& r : rows) {
    ScenarioConfig cfg = base;
    apply(cfg, p, r.value);
    nlohmann::json row = to_json(r.outcome);
    row["value"] = r.value;
    row["config"] = config_to_json(cfg);
    j["rows"].push_back(std::move(row));
    all_ok = all_ok && r.outcome.solution.optimal();
    if (r.outcome.solution.optimal()) t_avg.push_back(r.outcome.metrics.t_avg);
  }
  if (all_ok) {
    if (auto k = steady_state_index(t_avg)) {
      j["steady_state_value"] = rows[*k].value;
    } else {
      j["steady_state_value"] = nullptr;
    }
  }
  return j;
}

}  // namespace amod
