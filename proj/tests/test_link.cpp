// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numbers>

#include "pgrid/link_metrics.hpp"

using namespace pgrid;

namespace {
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}
}  // namespace

TEST(SuccessD2D, Limits) {
  auto p = GridParams::uniform(3, 1, 0.1, 0.3);
  EXPECT_NEAR(success_d2d(LinkQuery{1e-12, 1, 0, RoomIndex::origin(3)}, p), 1.0, 1e-9);
  auto p0 = GridParams::uniform(3, 1, 0.1, 0.0);
  EXPECT_NEAR(success_d2d(LinkQuery{1e9, 1, 0, RoomIndex::origin(3)}, p0), std::pow(1.4, -3.0), 1e-3);
  EXPECT_NEAR(success_d2d(LinkQuery{1e9, 1, 0, RoomIndex::origin(3)}, p0), 0.36443, 1e-5);
  EXPECT_EQ(success_d2d(LinkQuery{1.0, 1, 0, RoomIndex{{1, 0, 0}}}, p0), 0.0);
  EXPECT_THROW(success_d2d(LinkQuery{-1.0, 1, 0, RoomIndex::origin(3)}, p), domain_error);
}

TEST(SuccessD2D, BackoffAndThresholdEnterAsProduct) {
  auto p = GridParams::uniform(3, 1, 0.1, 0.3);
  const RoomIndex room{{1, 0, 1}};
  for (double c : {0.5, 3.0})
    EXPECT_EQ(success_d2d(LinkQuery{2.0, c, 0, room}, p), success_d2d(LinkQuery{2.0 * c, 1.0, 0, room}, p));
  EXPECT_LT(success_d2d(LinkQuery{1.0, 1, 0.5, room}, p), success_d2d(LinkQuery{1.0, 1, 0.0, room}, p));
}

TEST(JointSuccess, Reductions) {
  auto p = GridParams::uniform(3, 1, 0.1, 0.3);
  const RoomIndex room{{1, 1, 1}};
  const double a = room_attenuation(p, room);
  const double j = joint_success_d2d(1.5, 0.0, 1.0, p, room, 0.0, 0.0);
  EXPECT_NEAR(j, laplace_room(1.5, p, Channel::Rayleigh).value / (1.0 + 1.5 * a), 1e-9);
  EXPECT_NEAR(joint_success_d2d(1e-12, 1e-12, 1.0, p, room, 0, 0), 1.0, 1e-9);
  EXPECT_THROW(joint_success_d2d(1, 1, 1, p, RoomIndex::origin(3), 0, 0), domain_error);
  EXPECT_LE(joint_success_d2d(1, 1, 1, p, room, 0, 0), success_d2d(LinkQuery{1, 1, 0, RoomIndex::origin(3)}, p));
}

TEST(Strongest, TailAndMonotone) {
  auto p = GridParams::uniform(3, 1, 0.1, 0.1);
  SeriesControl c{4, 1e-9, 200};
  double prev = 1.0;
  for (double th : {2.0, 4.0, 8.0, 16.0}) {
    auto v = coverage_strongest(th, p, 0.0, c);
    EXPECT_EQ(v.tag, CoverageTag::Exact);
    EXPECT_LT(v.value, prev);
    EXPECT_GT(v.value, 0.0);
    prev = v.value;
  }
  EXPECT_LT(coverage_strongest(1e6, p, 0.0, c).value, 1e-3);
  EXPECT_EQ(coverage_strongest(0.5, p, 0.0, c).tag, CoverageTag::UpperBound);
  EXPECT_LT(coverage_strongest(2.0, p, 1.0, c).value, coverage_strongest(2.0, p, 0.0, c).value);
}

TEST(Strongest, EmptyNeighboursClosedForm) {
  // K = 0: only the zero cell matters. With N in-room BSs the coverage is
  // E[N (1/(1+theta))^{N-1}] over the zero-cell count.
  auto p = GridParams::uniform(3, 1, 0.1, 0.0);
  const double th = 3.0, c = 4.0, r = 0.1;
  // Per axis the count is mixed Poisson with Erlang-2 side; its pgf is (1 + c r (1 - z))^{-2}.
  auto pgf = [&](double z) { return std::pow(1.0 + c * r * (1.0 - z), -6.0); };
  const double z = 1.0 / (1.0 + th), h = 1e-6;
  const double deriv = (pgf(z + h) - pgf(z - h)) / (2 * h);
  EXPECT_NEAR(coverage_strongest(th, p, 0.0).value, deriv, 1e-7);
}

TEST(Nearest, LimitsAndRelation) {
  auto p = GridParams::uniform(3, 1, 0.1, 0.1);
  EXPECT_NEAR(coverage_nearest(1e-9, p, 0.0).value, 1.0, 1e-6);
  EXPECT_NEAR(coverage_nearest_asymptotic(1e-9, p, 0.0).value, 1.0, 1e-6);
  for (double th : {0.5, 1.0, 4.0}) {
    const double e = coverage_nearest(th, p, 0.0).value, a = coverage_nearest_asymptotic(th, p, 0.0).value;
    EXPECT_NEAR(e, (1.0 + th) * a, 1e-9);
    EXPECT_LE(e, coverage_strongest(std::max(th, 1.0 + 1e-9), p, 0.0).value + 1e-9 + (th < 1 ? 1.0 : 0.0));
  }
  EXPECT_THROW(coverage_nearest(1.0, GridParams{{1, 1, 1}, {0.1, 0.1, 0.1}, {0.1, 0.2, 0.1}}, 0.0), domain_error);
}

TEST(Nearest, ForbiddenCountsMatchBallSizes) {
  // No BS within graph distance < 2: piece 1 forbids a radius-1 transverse ball (5 sites), piece 2 one site.
  auto p = GridParams::uniform(3, 1, 0.1, 0.3);
  const double c = 4.0, r = 0.1;
  const double expected = std::pow(1.0 + c * r * 5.0, -6.0) * std::pow(1.0 + c * r * 1.0, -6.0);
  EXPECT_NEAR(detail::nearest_factor(p, 2, 0.0, SeriesControl{}), expected, 1e-14);
}

TEST(Nearest, ZeroLossOnlyInRoomServes) {
  auto p = GridParams::uniform(3, 1, 0.1, 0.0);
  const double th = 2.0, c = 4.0, r = 0.1;
  auto pgf = [&](double z) { return std::pow(1.0 + c * r * (1.0 - z), -6.0); };
  const double z = 1.0 / (1.0 + th);
  // E[(1+theta)^{-(N-1)} 1{N >= 1}] = (1+theta)(G(z) - G(0)).
  EXPECT_NEAR(coverage_nearest(th, p, 0.0).value, (1.0 + th) * (pgf(z) - pgf(0.0)), 1e-12);
}

TEST(ConditionalDelta0, ZeroLossReduction) {
  GridRealization g;
  g.n = 3;
  g.window = {{0, 10}, {0, 10}, {0, 10}};
  g.walls = {{2.0, 5.5, 7.0}, {1.0, 6.0}, {3.0, 4.5, 8.0}};
  auto p = GridParams::uniform(3, 1, 0.1, 0.0);
  auto v = ZeroCellView::from(g, Point{5.0, 5.0, 4.0});
  const double lam = 4 * 0.1 * ((5.5 - 2.0) + (6.0 - 1.0) + (4.5 - 3.0));
  EXPECT_NEAR(v.zero_cell_mean(p), lam, 1e-12);
  for (double s : {0.3, 1.0, 5.0}) {
    const double closed = (1 + s) * (std::exp(-lam * s / (1 + s)) - std::exp(-lam)) / (1 - std::exp(-lam));
    EXPECT_NEAR(conditional_laplace_delta0(s, v, p), closed, 1e-12);
  }
  EXPECT_EQ(conditional_laplace_delta0(0.0, v, p), 1.0);
  auto p3 = GridParams::uniform(3, 1, 0.1, 0.3);
  EXPECT_LT(conditional_laplace_delta0(1.0, v, p3), conditional_laplace_delta0(1.0, v, p));
}

TEST(FreeSpace, ClosedFormAndScaleInvariance) {
  for (double alpha : {3.5, 4.0}) {
    for (double th : {0.5, 1.0, 4.0}) {
      // Substituting u = r t removes the density: P = 1 / (1 + 3 C).
      auto g = [&](double x) {  // t = x^{-2} on (0, 1]
        return 2.0 * th * std::pow(x, 2.0 * alpha - 7.0) / (th * std::pow(x, 2.0 * alpha) + 1.0);
      };
      const double cc = simpson(g, 0.0, 1.0, 200000);
      const double expected = 1.0 / (1.0 + 3.0 * cc);
      for (double lam : {0.1, 1.0, 1.2}) EXPECT_NEAR(freespace_coverage(th, FreeSpaceParams{lam, alpha}), expected, 1e-6);
    }
  }
  EXPECT_NEAR(freespace_coverage(1e-9, FreeSpaceParams{1.0, 4.0}), 1.0, 1e-6);
  EXPECT_THROW(freespace_coverage(1.0, FreeSpaceParams{1.0, 3.0}), domain_error);
}
