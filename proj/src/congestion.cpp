#include "amod/congestion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace amod {

namespace {

void check(const BprParams& p) {
  if (!(p.t0 > 0.0)) throw std::invalid_argument("BPR t0 must be positive");
  if (!(p.capacity > 0.0)) {
    throw std::invalid_argument("BPR capacity must be positive");
  }
}

}  // namespace

double bpr_time(const BprParams& p, double x_road) {
  check(p);
  if (!(x_road >= 0.0)) throw std::invalid_argument("negative road flow");
  return p.t0 * (1.0 + p.alpha * std::pow(x_road / p.capacity, p.power));
}

double total_latency(const BprParams& p, double x) { return x * bpr_time(p, x); }

double total_latency_slope(const BprParams& p, double x) {
  check(p);
  if (!(x >= 0.0)) throw std::invalid_argument("negative road flow");
  // d/dx [t0 x + t0 a x^(p+1) / h^p]
  return p.t0 *
         (1.0 + p.alpha * (p.power + 1.0) * std::pow(x / p.capacity, p.power));
}

std::vector<PwlSegment> tangents_at(const BprParams& p,
                                    std::span<const double> points) {
  std::vector<PwlSegment> out;
  out.reserve(points.size());
  for (double xk : points) {
    const double s = total_latency_slope(p, xk);
    out.push_back({s, total_latency(p, xk) - s * xk, xk});
  }
  std::sort(out.begin(), out.end(),
            [](const PwlSegment& a, const PwlSegment& b) {
              return a.slope < b.slope;
            });
  return out;
}

std::vector<PwlSegment> linearize_total_latency(const BprParams& p, int segments,
                                                double x_max) {
  if (segments < 1) throw std::invalid_argument("need at least one segment");
  if (!(x_max > 0.0)) throw std::invalid_argument("x_max must be positive");
  std::vector<double> points(segments);
  for (int k = 0; k < segments; ++k) {
    points[k] = x_max * static_cast<double>(k) / segments;
  }
  return tangents_at(p, points);
}

double pwl_max(std::span<const PwlSegment> pieces, double x) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : pieces) best = std::max(best, s(x));
  return best;
}

}  // namespace amod
