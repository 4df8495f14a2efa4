// Runs the acceptance criteria end to end on the shipped data and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "amod/config.hpp"
#include "amod/congestion.hpp"
#include "amod/experiments.hpp"
#include "amod/model.hpp"
#include "amod/oracle.hpp"
#include "amod/scenario.hpp"
#include "amod/solution.hpp"
#include "amod/tntp.hpp"
#include "support.hpp"

namespace {

using namespace amod;

struct Check {
  bool pass = true;
  std::ostringstream note;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [" << what << "]";
    }
  }
};

// Every optimal outcome produced here goes through the conservation suite.
std::vector<std::pair<std::string, RunOutcome>> g_solved;

void record(const std::string& label, const RunOutcome& o) {
  if (o.solution.optimal()) g_solved.emplace_back(label, o);
}

int workers() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct Data {
  tntp::Network net;
  tntp::Trips trips;
  ScenarioConfig base;
};

const Data& data() {
  static const Data d = [] {
    Data x;
    x.base = load_config(test::data_path("sioux_falls.json"));
    x.net = tntp::read_net_file(x.base.net_file.string());
    x.trips = tntp::read_trips_file(x.base.trips_file.string());
    return x;
  }();
  return d;
}

ScenarioConfig uncapacitated(ScenarioConfig c) {
  c.fleet_road = c.fleet_micro = c.beta_node = c.beta_total = 1e9;
  c.switch_capacity = 1e9;
  c.road_capacity_scale = 1e9;
  return c;
}

std::vector<SweepRow> run_sweep(SweepParameter p, std::vector<double> values) {
  const auto& d = data();
  auto rows = sweep(d.net, d.trips, d.base, p, std::move(values), workers());
  for (const auto& r : rows) {
    record(std::string(to_string(p)) + "=" + std::to_string(r.value), r.outcome);
  }
  return rows;
}

bool all_ok(const std::vector<SweepRow>& rows, Check& c) {
  for (const auto& r : rows) {
    if (!r.outcome.ok) {
      c.expect(false, "point " + std::to_string(r.value) + " " + r.outcome.error);
      return false;
    }
  }
  return true;
}

void criterion1(Check& c) {
  const auto& d = data();
  const auto cfg = uncapacitated(d.base);
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = run_scenario(d.net, d.trips, cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  record("uncapacitated", out);
  c.expect(out.ok, "solve " + out.error);
  if (!out.ok) return;
  const auto sc = build_scenario(d.net, d.trips, cfg);
  const double oracle = uncapacitated_optimum(sc.graph, sc.demand);
  const double rel = std::abs(out.solution.objective - oracle) / oracle;
  c.note << " objective " << out.solution.objective << " oracle " << oracle << " rel " << rel
         << " time " << secs << " s";
  c.expect(rel <= 1e-6, "objective vs oracle");
  c.expect(secs < 60.0, "runtime");
}

void criterion2(Check& c) {
  const auto& d = data();
  ScenarioConfig cfg = d.base;
  cfg.fleet_road = 0.0;
  cfg.fleet_micro = 0.0;
  const auto out = run_scenario(d.net, d.trips, cfg);
  record("walking only", out);
  c.expect(out.ok, "solve " + out.error);
  if (!out.ok) return;
  const auto sc = build_scenario(d.net, d.trips, cfg);
  const double oracle =
      uncapacitated_optimum(sc.graph, sc.demand, {Layer::kWalking}) / sc.demand.total_rate();
  const double rel = std::abs(out.metrics.t_avg - oracle) / oracle;
  const auto& s = out.metrics.share;
  c.note << " t_avg " << out.metrics.t_avg << " oracle " << oracle << " rel " << rel
         << " shares " << s.walking << "/" << s.micromobility << "/" << s.amod;
  c.expect(rel <= 1e-6, "t_avg vs walking oracle");
  c.expect(s.walking == 1.0 && s.micromobility == 0.0 && s.amod == 0.0, "shares exact");
}

std::vector<SweepRow> g_nr, g_nm, g_bn, g_bt, g_hs;

void criterion4(Check& c) {
  g_nr = run_sweep(SweepParameter::kFleetRoad, {0, 2000, 4000, 6000, 8000, 10000});
  g_nm = run_sweep(SweepParameter::kFleetMicro, {0, 1000, 2000, 3000, 4000, 5000});
  g_bn = run_sweep(SweepParameter::kBetaNode, {0, 1, 2, 3, 4, 5});
  g_bt = run_sweep(SweepParameter::kBetaTotal, {0, 2, 4, 6, 8, 10});
  g_hs = run_sweep(SweepParameter::kSwitchCapacity, {200, 400, 600, 800, 1000, 1200});
  const std::pair<const char*, std::vector<SweepRow>*> all[] = {
      {"n_R", &g_nr}, {"n_M", &g_nm}, {"beta_node", &g_bn}, {"beta_total", &g_bt},
      {"h_S", &g_hs}};
  for (const auto& [name, rows] : all) {
    if (!all_ok(*rows, c)) continue;
    double worst = 0.0;
    for (std::size_t i = 1; i < rows->size(); ++i) {
      const double a = (*rows)[i - 1].outcome.metrics.objective;
      const double b = (*rows)[i].outcome.metrics.objective;
      const double rise = (b - a) / std::max(1.0, std::abs(a));
      worst = std::max(worst, rise);
      c.expect(rise <= 1e-9, std::string(name) + " step " + std::to_string(i));
    }
    c.note << " " << name << " worst rise " << worst;
  }
}

void criterion5(Check& c) {
  if (!all_ok(g_nr, c)) return;
  std::vector<double> t;
  for (const auto& r : g_nr) t.push_back(r.outcome.metrics.t_avg);
  const auto& s0 = g_nr[0].outcome.metrics.share;
  const auto& s1 = g_nr[1].outcome.metrics.share;
  c.expect(s0.amod == 0.0, "AMoD share at n_R = 0");
  c.expect(s1.amod > s0.amod, "AMoD share rises");
  c.expect(s1.walking < s0.walking, "walking share falls");
  const auto knee = steady_state_index(t);
  c.expect(knee.has_value(), "steady state");
  c.note << " amod share " << s0.amod << " -> " << s1.amod << ", walking " << s0.walking
         << " -> " << s1.walking;
  if (knee) c.note << ", steady t_avg " << t[*knee] << " h from n_R = " << g_nr[*knee].value;
}

void criterion6(Check& c) {
  if (!all_ok(g_nm, c)) return;
  for (std::size_t i = 1; i <= 3; ++i) {
    const auto& a = g_nm[i - 1].outcome.metrics.share;
    const auto& b = g_nm[i].outcome.metrics.share;
    c.expect(b.micromobility > a.micromobility, "micro share step " + std::to_string(i));
    c.expect(b.amod > a.amod, "AMoD share step " + std::to_string(i));
    c.expect(b.walking < a.walking, "walking share step " + std::to_string(i));
  }
  c.note << " micro " << g_nm[0].outcome.metrics.share.micromobility << " -> "
         << g_nm[3].outcome.metrics.share.micromobility << ", amod "
         << g_nm[0].outcome.metrics.share.amod << " -> " << g_nm[3].outcome.metrics.share.amod;
}

void criterion7(Check& c) {
  for (const auto* rows : {&g_bn, &g_bt}) {
    if (!all_ok(*rows, c)) continue;
    c.note << " ";
    for (std::size_t i = 0; i < rows->size(); ++i) {
      const double v = (*rows)[i].outcome.metrics.amod_rebalancing_total;
      c.note << (i ? "," : "") << v;
      if (i > 0) {
        const double prev = (*rows)[i - 1].outcome.metrics.amod_rebalancing_total;
        c.expect(v <= prev + 1e-6, "step " + std::to_string(i));
      }
    }
  }
}

void criterion3(Check& c) {
  double cons = 0.0, veh = 0.0, gap = 0.0;
  for (const auto& [label, o] : g_solved) {
    const auto& r = o.report;
    const double v = std::max({r.max_violation[static_cast<int>(RowFamily::kRoadBalance)],
                               r.max_violation[static_cast<int>(RowFamily::kMicroBalance)],
                               r.max_violation[static_cast<int>(RowFamily::kRebalancingBalance)]});
    cons = std::max(cons, r.max_conservation_relative);
    veh = std::max(veh, v);
    gap = std::max(gap, o.solution.relative_gap);
    c.expect(r.max_conservation_relative <= 1e-8, label + " conservation");
    c.expect(v <= 1e-8, label + " vehicle balance");
    c.expect(o.solution.relative_gap <= 1e-6, label + " gap");
  }
  c.note << " " << g_solved.size() << " scenarios, conservation " << cons << ", balance "
         << veh << ", gap " << gap;
}

void criterion8(Check& c) {
  std::mt19937 rng(8);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = test::random_instance(rng);
    const auto g = build_supergraph(inst.road, inst.config);
    ScenarioConfig cfg = inst.config;
    cfg.aggregate_commodities = true;
    const auto a = solve(build_lp(g, inst.demand, cfg), g);
    cfg.aggregate_commodities = false;
    const auto b = solve(build_lp(g, inst.demand, cfg), g);
    c.expect(a.optimal() && b.optimal(), "random " + std::to_string(trial));
    if (!a.optimal() || !b.optimal()) continue;
    const double rel = std::abs(a.objective - b.objective) / std::max(1.0, std::abs(b.objective));
    worst = std::max(worst, rel);
    c.expect(rel <= 1e-7, "random " + std::to_string(trial));
  }
  const auto& d = data();
  ScenarioConfig cfg = d.base;
  const auto agg = run_scenario(d.net, d.trips, cfg);
  cfg.aggregate_commodities = false;
  const auto per = run_scenario(d.net, d.trips, cfg);
  record("aggregated", agg);
  record("per request", per);
  c.expect(agg.ok && per.ok, "Sioux Falls solves");
  if (agg.ok && per.ok) {
    const double rel = std::abs(agg.solution.objective - per.solution.objective) /
                       std::abs(per.solution.objective);
    c.expect(rel <= 1e-7, "Sioux Falls");
    c.note << " Sioux Falls " << agg.solution.objective << " vs " << per.solution.objective
           << " rel " << rel << ";";
  }
  c.note << " random worst rel " << worst;
}

void criterion9(Check& c) {
  const BprParams p{0.1, 100.0};
  const double x_max = 2.0 * p.capacity;
  double prev_gap = std::numeric_limits<double>::infinity();
  for (int K : {1, 2, 4, 8}) {
    const auto pieces = linearize_total_latency(p, K, x_max);
    double gap = 0.0;
    bool below = true;
    for (int i = 0; i <= 1000; ++i) {
      const double x = x_max * i / 1000.0;
      const double L = total_latency(p, x);
      const double f = pwl_max(pieces, x);
      if (f > L + 1e-12 * std::max(1.0, L)) below = false;
      if (L > 0.0) gap = std::max(gap, (L - f) / L);
    }
    bool touch = true;
    for (const auto& s : pieces) {
      const double L = total_latency(p, s.breakpoint);
      if (std::abs(pwl_max(pieces, s.breakpoint) - L) > 1e-12 * std::max(1.0, L)) touch = false;
    }
    c.expect(below, "minorant K=" + std::to_string(K));
    c.expect(touch, "touch K=" + std::to_string(K));
    c.expect(gap < prev_gap, "gap shrinks K=" + std::to_string(K));
    c.note << " K=" << K << " gap " << gap;
    prev_gap = gap;
  }
}

void criterion10(Check& c) {
  const auto& d = data();
  c.expect(d.net.node_count == 24, "24 nodes");
  c.expect(d.net.links.size() == 76, "76 links");
  const double total = d.trips.total() + d.trips.dropped_diagonal;
  c.expect(std::abs(total - 360600.0) < 1e-6, "OD total");
  c.expect(std::abs(total - d.trips.declared_total) < 1e-6, "matches header");
  const auto again = tntp::parse_net(tntp::serialize_net(d.net));
  c.expect(again == d.net, "round trip");
  c.note << " nodes " << d.net.node_count << " links " << d.net.links.size() << " OD total "
         << total;
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  struct Item {
    int id;
    const char* name;
    std::function<void(Check&)> run;
  };
  // Order of execution; criterion 3 audits everything solved before it.
  const Item items[] = {
      {1, "oracle equivalence (uncapacitated)", criterion1},
      {2, "walking-only baseline", criterion2},
      {4, "monotonicity suite", criterion4},
      {5, "n_R sweep trends", criterion5},
      {6, "n_M sweep trends", criterion6},
      {7, "rebalancing-capacity sweeps", criterion7},
      {8, "aggregation equivalence", criterion8},
      {9, "congestion linearization", criterion9},
      {10, "parser golden files", criterion10},
      {3, "conservation suite", criterion3},
  };
  std::vector<std::string> lines(11);
  int failures = 0;
  for (const auto& it : items) {
    Check c;
    try {
      it.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    failures += c.pass ? 0 : 1;
    char head[160];
    std::snprintf(head, sizeof head, "%s  %2d  %s:", c.pass ? "PASS" : "FAIL", it.id, it.name);
    lines[it.id] = head + c.note.str();
  }
  for (int id = 1; id <= 10; ++id) std::printf("%s\n", lines[id].c_str());
  return failures;
}
