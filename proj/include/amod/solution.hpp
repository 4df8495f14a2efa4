#pragma once

#include <array>
#include <string>
#include <vector>

#include "amod/graph.hpp"
#include "amod/model.hpp"
#include "amod/solver.hpp"
#include "json.hpp"

namespace amod {

struct FlowSolution {
  lp::Status status = lp::Status::kNumericalFailure;
  int commodities = 0;
  int arcs = 0;
  std::vector<double> x;               // raw LP column values
  std::vector<double> user_flow;       // commodity-major, commodities * arcs
  std::vector<double> aggregate_flow;  // X per arc
  std::vector<double> rebalancing_flow;  // x0 per road arc
  std::vector<double> beta_in;
  std::vector<double> beta_out;
  std::vector<double> epigraph;        // empty outside PWL mode
  // Objective of the routing program at x (total user travel time).
  double objective = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  bool rebalancing_minimized = false;
  std::string message;

  double flow(int commodity, int arc) const {
    return user_flow[static_cast<std::size_t>(commodity) * arcs + arc];
  }
  bool optimal() const { return status == lp::Status::kOptimal; }
};

struct SolveOptions {
  lp::SolverOptions lp;
  // Second pass: least rebalancing among routing optima.
  bool minimize_rebalancing = true;
  bool time_weighted_rebalancing = false;
};

FlowSolution solve(const LinearModel& model, const Supergraph& g,
                   const SolveOptions& options = {});

// Splits raw column values into the structured fields.
FlowSolution extract_solution(const LinearModel& model, std::vector<double> x);

struct VerifyReport {
  // Largest violation per row family: |residual| for equalities, positive
  // excess for inequalities.
  std::array<double, kRowFamilyCount> max_violation{};
  // max over (m, j) of |residual| / max(1, alpha_m).
  double max_conservation_relative = 0.0;
  double min_value = 0.0;  // most negative column value
  double aggregate_mismatch = 0.0;
  double objective = 0.0;  // recomputed from flows
  double objective_relative_error = 0.0;
  std::vector<int> violated_rows;  // rows beyond `tolerance`
  double tolerance = 0.0;

  double max_equality_residual() const;
  double max_inequality_violation() const;
  bool ok() const { return violated_rows.empty() && min_value >= -1e-9; }
};

VerifyReport verify(const FlowSolution& sol, const LinearModel& model,
                    double tolerance = 1e-8);

nlohmann::json to_json(const FlowSolution& sol);
nlohmann::json to_json(const VerifyReport& report);

}  // namespace amod
