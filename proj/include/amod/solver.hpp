#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "amod/lp.hpp"

namespace amod::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

std::string_view to_string(Status s);

struct SolverOptions {
  // Interior-point stopping tolerance on scaled relative residuals and gap.
  double tolerance = 1e-10;
  int max_iterations = 200;
  // Active-set cleanup after the interior-point phase.
  bool polish = true;
  // Classification tolerance for the auxiliary feasibility problems.
  double feasibility_tolerance = 1e-7;
  // Inequality rows with rhs above this multiple of the median |rhs| are
  // enforced lazily.
  double loose_row_factor = 1e4;
};

struct Result {
  Status status = Status::kNumericalFailure;
  std::vector<double> x;      // one per LpProblem column
  std::vector<double> duals;  // one per LpProblem row; 0 for free rows
  // c - A'y per LpProblem column (upper-bound multipliers not subtracted).
  std::vector<double> reduced_costs;
  double objective = 0.0;
  double dual_objective = 0.0;
  // |objective - dual_objective| / max(1, |objective|)
  double relative_gap = 0.0;
  double max_primal_residual = 0.0;  // unscaled, over all original rows
  double max_dual_infeasibility = 0.0;
  int iterations = 0;
  bool polished = false;
  // Farkas ray over LpProblem rows when infeasible: y with y.b > 0,
  // y'A <= 0 on every column (y_r <= 0 on <= rows).
  std::vector<double> farkas;
  std::string message;
};

// Primal-dual interior point (Mehrotra predictor-corrector) on regularized
// normal equations, factored with CHOLMOD. Safe to call concurrently on
// distinct problems.
Result solve(const LpProblem& problem, const SolverOptions& options = {});

// Copy of `problem` restricted to the optimal face certified by `optimal`:
// columns at zero with a positive reduced cost are fixed at zero and
// inequality rows that are tight with a nonzero dual become equalities.
// Complementary slackness makes every feasible point of the copy optimal
// for `problem` up to the tolerance.
LpProblem restrict_to_optimal_face(const LpProblem& problem, const Result& optimal,
                                   double tolerance = 1e-9);

}  // namespace amod::lp
