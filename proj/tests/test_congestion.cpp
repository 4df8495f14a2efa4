#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "amod/congestion.hpp"

namespace amod {
namespace {

TEST(Bpr, Examples) {
  const BprParams p{0.2, 500.0};
  EXPECT_DOUBLE_EQ(bpr_time(p, 0.0), 0.2);
  EXPECT_NEAR(bpr_time(p, 500.0), 1.15 * 0.2, 1e-15);
  EXPECT_NEAR(bpr_time(p, 1000.0), 3.4 * 0.2, 1e-15);
  EXPECT_THROW(bpr_time(p, -1.0), std::invalid_argument);
}

TEST(Bpr, LatencyAndSlope) {
  const BprParams p{0.5, 10.0};
  for (double x : {0.0, 1.0, 7.5, 10.0, 23.0}) {
    EXPECT_DOUBLE_EQ(total_latency(p, x), x * bpr_time(p, x));
    const double h = 1e-5 * (1.0 + x);
    const double fd = (total_latency(p, x + h) - total_latency(p, std::max(0.0, x - h))) /
                      (x + h - std::max(0.0, x - h));
    EXPECT_NEAR(total_latency_slope(p, x), fd, 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST(Pwl, SingleSegmentIsFreeFlow) {
  const BprParams p{0.3, 40.0};
  const auto pieces = linearize_total_latency(p, 1, 80.0);
  ASSERT_EQ(pieces.size(), 1u);
  EXPECT_DOUBLE_EQ(pieces[0].slope, 0.3);
  EXPECT_DOUBLE_EQ(pieces[0].intercept, 0.0);
}

TEST(Pwl, ThreeSegmentsTouchAtBreakpoints) {
  const BprParams p{1.0, 1.0};
  const auto pieces = linearize_total_latency(p, 3, 2.0);
  ASSERT_EQ(pieces.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    const double x = 2.0 * k / 3.0;
    EXPECT_DOUBLE_EQ(pieces[k].breakpoint, x);
    EXPECT_NEAR(pwl_max(pieces, x), total_latency(p, x), 1e-12 * (1.0 + total_latency(p, x)));
  }
}

TEST(Pwl, OrderedSlopesAndIncreasingIntersections) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const BprParams p{u(rng), 10.0 * u(rng)};
    const int K = 1 + trial % 9;
    const auto pieces = linearize_total_latency(p, K, 2.0 * p.capacity);
    double last_cross = -1.0;
    for (std::size_t k = 1; k < pieces.size(); ++k) {
      EXPECT_LT(pieces[k - 1].slope, pieces[k].slope);
      const double cross = (pieces[k - 1].intercept - pieces[k].intercept) /
                           (pieces[k].slope - pieces[k - 1].slope);
      EXPECT_GT(cross, last_cross);
      EXPECT_GE(cross, pieces[k - 1].breakpoint - 1e-12);
      EXPECT_LE(cross, pieces[k].breakpoint + 1e-12);
      last_cross = cross;
    }
  }
}

TEST(Pwl, MinorantProperty) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const BprParams p{u(rng), 50.0 * u(rng)};
    const auto pieces = linearize_total_latency(p, 1 + trial % 8, 2.0 * p.capacity);
    for (int i = 0; i <= 1000; ++i) {
      const double x = 2.0 * p.capacity * i / 1000.0;
      const double L = total_latency(p, x);
      EXPECT_LE(pwl_max(pieces, x), L + 1e-12 * (1.0 + L));
    }
  }
}

TEST(Pwl, TangentsAtExplicitPoints) {
  const BprParams p{0.1, 5.0};
  const double pts[] = {0.0, 2.0, 6.0};
  const auto pieces = tangents_at(p, pts);
  ASSERT_EQ(pieces.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_DOUBLE_EQ(pieces[k].slope, total_latency_slope(p, pts[k]));
    EXPECT_NEAR(pieces[k](pts[k]), total_latency(p, pts[k]), 1e-14);
  }
}

}  // namespace
}  // namespace amod
