#include "amod/solution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace amod {

FlowSolution extract_solution(const LinearModel& model, std::vector<double> x) {
  const VariableIndex& ix = model.index;
  FlowSolution s;
  s.commodities = ix.commodities();
  s.arcs = ix.arcs();
  s.user_flow.assign(x.begin(), x.begin() + ix.commodities() * ix.arcs());
  s.aggregate_flow.assign(ix.arcs(), 0.0);
  for (int m = 0; m < ix.commodities(); ++m) {
    for (int a = 0; a < ix.arcs(); ++a) {
      s.aggregate_flow[a] += x[ix.user_flow(m, a)];
    }
  }
  for (int r = 0; r < ix.road_arcs(); ++r) {
    s.rebalancing_flow.push_back(x[ix.rebalancing(r)]);
  }
  for (int v = 0; v < ix.micro_nodes(); ++v) {
    s.beta_in.push_back(x[ix.beta_in(v)]);
    s.beta_out.push_back(x[ix.beta_out(v)]);
  }
  if (ix.has_epigraph()) {
    for (int r = 0; r < ix.road_arcs(); ++r) s.epigraph.push_back(x[ix.epigraph(r)]);
  }
  s.objective = model.lp.objective(x);
  s.x = std::move(x);
  return s;
}

FlowSolution solve(const LinearModel& model, const Supergraph& g,
                   const SolveOptions& options) {
  lp::Result first = lp::solve(model.lp, options.lp);
  if (first.status != lp::Status::kOptimal) {
    FlowSolution s;
    s.status = first.status;
    s.commodities = model.index.commodities();
    s.arcs = model.index.arcs();
    s.iterations = first.iterations;
    s.message = first.message;
    return s;
  }
  // Lexicographic passes over the optimal face. A pass is kept only if the
  // routing objective stays within tolerance of the first-stage optimum.
  const double tol = 1e-7 * (1.0 + std::abs(first.objective));
  std::vector<double> best = first.x;
  int iterations = first.iterations;
  bool minimized = false;
  std::string message;
  if (options.minimize_rebalancing) {
    const lp::LpProblem* base = &model.lp;
    const lp::Result* optimum = &first;
    lp::LpProblem stage[2];
    lp::Result result[2];
    const RebalancingTarget targets[2] = {RebalancingTarget::kAmod,
                                          RebalancingTarget::kMicro};
    for (int k = 0; k < 2; ++k) {
      stage[k] = rebalancing_program(*base, *optimum, model, g, targets[k],
                                     options.time_weighted_rebalancing);
      result[k] = lp::solve(stage[k], options.lp);
      iterations += result[k].iterations;
      if (result[k].status != lp::Status::kOptimal) {
        message = "rebalancing pass: " + std::string(lp::to_string(result[k].status));
        break;
      }
      if (model.lp.objective(result[k].x) > first.objective + tol) {
        message = "rebalancing pass left the optimal face";
        break;
      }
      best = result[k].x;
      minimized = k == 1;
      base = &stage[k];
      optimum = &result[k];
    }
  }
  FlowSolution s = extract_solution(model, std::move(best));
  s.iterations = iterations;
  s.rebalancing_minimized = minimized;
  s.message = message;
  s.status = lp::Status::kOptimal;
  s.relative_gap = first.relative_gap;
  return s;
}

double VerifyReport::max_equality_residual() const {
  double m = 0.0;
  for (RowFamily f : {RowFamily::kUserConservation, RowFamily::kRoadBalance,
                      RowFamily::kMicroBalance, RowFamily::kRebalancingBalance}) {
    m = std::max(m, max_violation[static_cast<int>(f)]);
  }
  return m;
}

double VerifyReport::max_inequality_violation() const {
  double m = 0.0;
  for (RowFamily f : {RowFamily::kRebalancingTotal, RowFamily::kFleetRoad,
                      RowFamily::kFleetMicro, RowFamily::kRoadCapacity,
                      RowFamily::kSwitchCapacity, RowFamily::kNodeRebalancingCap,
                      RowFamily::kEpigraph}) {
    m = std::max(m, max_violation[static_cast<int>(f)]);
  }
  return m;
}

VerifyReport verify(const FlowSolution& sol, const LinearModel& model,
                    double tolerance) {
  VerifyReport rep;
  rep.tolerance = tolerance;
  const lp::LpProblem& lp = model.lp;
  const int conservation_rows = model.index.commodities() * model.node_count;
  for (int r = 0; r < lp.num_rows(); ++r) {
    const double act = lp.row_activity(r, sol.x);
    const double rhs = lp.rhs(r);
    double viol = 0.0;
    if (lp.sense(r) == lp::Sense::kEqual) {
      viol = std::abs(act - rhs);
    } else if (std::isfinite(rhs)) {
      viol = std::max(0.0, act - rhs);
    }
    const int fam = lp.tag(r);
    if (fam >= 0 && fam < kRowFamilyCount) {
      rep.max_violation[fam] = std::max(rep.max_violation[fam], viol);
    }
    double scale = std::isfinite(rhs) ? std::max(1.0, std::abs(rhs)) : 1.0;
    if (r < conservation_rows) {
      const double alpha = model.commodities[r / model.node_count].rate;
      const double rel = viol / std::max(1.0, alpha);
      rep.max_conservation_relative = std::max(rep.max_conservation_relative, rel);
      scale = std::max(1.0, alpha);
    }
    if (viol > tolerance * scale) rep.violated_rows.push_back(r);
  }
  for (std::size_t j = 0; j < sol.x.size(); ++j) {
    rep.min_value = std::min(rep.min_value, sol.x[j]);
  }
  for (int a = 0; a < sol.arcs; ++a) {
    double sum = 0.0;
    for (int m = 0; m < sol.commodities; ++m) sum += sol.flow(m, a);
    rep.aggregate_mismatch =
        std::max(rep.aggregate_mismatch, std::abs(sum - sol.aggregate_flow[a]));
  }
  rep.objective = lp.objective(sol.x);
  rep.objective_relative_error =
      std::abs(rep.objective - sol.objective) / std::max(1.0, std::abs(rep.objective));
  return rep;
}

nlohmann::json to_json(const FlowSolution& sol) {
  nlohmann::json j;
  j["status"] = std::string(lp::to_string(sol.status));
  j["objective"] = sol.objective;
  j["relative_gap"] = sol.relative_gap;
  j["iterations"] = sol.iterations;
  j["rebalancing_minimized"] = sol.rebalancing_minimized;
  j["aggregate_flow"] = sol.aggregate_flow;
  j["rebalancing_flow"] = sol.rebalancing_flow;
  j["beta_in"] = sol.beta_in;
  j["beta_out"] = sol.beta_out;
  if (!sol.epigraph.empty()) j["epigraph"] = sol.epigraph;
  if (!sol.message.empty()) j["message"] = sol.message;
  return j;
}

nlohmann::json to_json(const VerifyReport& report) {
  nlohmann::json j;
  nlohmann::json fam = nlohmann::json::object();
  for (int f = 0; f < kRowFamilyCount; ++f) {
    fam[std::string(to_string(static_cast<RowFamily>(f)))] = report.max_violation[f];
  }
  j["max_violation"] = fam;
  j["max_conservation_relative"] = report.max_conservation_relative;
  j["min_value"] = report.min_value;
  j["objective_relative_error"] = report.objective_relative_error;
  j["violated_rows"] = report.violated_rows.size();
  j["ok"] = report.ok();
  return j;
}

}  // namespace amod
