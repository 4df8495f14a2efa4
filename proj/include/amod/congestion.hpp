#pragma once

#include <span>
#include <vector>

namespace amod {

// BPR volume-delay parameters for one road arc.
struct BprParams {
  double t0 = 0.0;  // free-flow time, hours
  double capacity = 0.0;  // h_R, flow per hour
  double alpha = 0.15;
  double power = 4.0;
};

// One affine piece of the total-latency curve L(x) = x * t(x).
struct PwlSegment {
  double slope = 0.0;      // hours per flow unit
  double intercept = 0.0;  // flow-hours
  double breakpoint = 0.0; // tangent point

  double operator()(double x) const { return slope * x + intercept; }
};

// t0 * (1 + alpha * (x / h)^power). Throws std::invalid_argument for x < 0.
double bpr_time(const BprParams& p, double x_road);

// L(x) = x * bpr_time(p, x) and its derivative.
double total_latency(const BprParams& p, double x);
double total_latency_slope(const BprParams& p, double x);

// Tangents of L at x_k = (k / K) * x_max, k = 0..K-1, ordered by increasing
// slope. Their pointwise max minorizes L and touches it at each x_k.
std::vector<PwlSegment> linearize_total_latency(const BprParams& p, int segments,
                                                double x_max);

// Tangents at an explicit set of points (sorted ascending, nonnegative).
std::vector<PwlSegment> tangents_at(const BprParams& p,
                                    std::span<const double> points);

double pwl_max(std::span<const PwlSegment> pieces, double x);

}  // namespace amod
