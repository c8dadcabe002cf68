// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "pgrid/core.hpp"
#include "pgrid/random.hpp"
#include "pgrid/series.hpp"

using namespace pgrid;

TEST(Params, Validation) {
  EXPECT_NO_THROW(GridParams::uniform(3, 1.0, 0.1, 0.0));
  EXPECT_THROW(GridParams::uniform(1, 1.0, 0.1, 0.0), domain_error);
  EXPECT_THROW(GridParams::uniform(3, 0.0, 0.1, 0.0), domain_error);
  EXPECT_THROW(GridParams::uniform(3, 1.0, -0.1, 0.0), domain_error);
  EXPECT_THROW(GridParams::uniform(3, 1.0, 0.1, 1.0), domain_error);
  GridParams bad{{1, 1}, {0.1}, {0, 0}};
  EXPECT_THROW(bad.validate(), domain_error);
}

TEST(Params, AvgDensity) {
  EXPECT_NEAR(avg_density(GridParams::uniform(3, 1.0, 0.1, 0.0)), 1.2, 1e-15);
  EXPECT_NEAR(avg_density(GridParams{{1.0, 2.0}, {0.1, 0.2}, {0, 0}}), 0.8, 1e-15);
  EXPECT_EQ(avg_density(GridParams::uniform(4, 1.0, 0.0, 0.3)), 0.0);
}

TEST(Params, ZeroToZeroIsOne) {
  EXPECT_EQ(ipow(0.0, 0), 1.0);
  EXPECT_EQ(ipow(0.0, 3), 0.0);
  EXPECT_DOUBLE_EQ(ipow(0.1, 2), 0.01);
}

TEST(Rotation, PinnedForThreeAxes) {
  std::vector<int> k{1, 2, 3};
  EXPECT_EQ(rotated(k, 0), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(rotated(k, 1), (std::vector<int>{2, 3, 1}));
  EXPECT_EQ(rotated(k, 2), (std::vector<int>{3, 1, 2}));
}

TEST(Series, MassesAndFoldedLattice) {
  const double k = 0.3;
  double box = 0.0;
  for (int i = -5; i <= 5; ++i) box += ipow(k, std::abs(i));
  EXPECT_NEAR(box_mass(k, 5), box, 1e-15);
  EXPECT_NEAR(half_box_mass(k, 4), 1 + k + k * k + k * k * k, 1e-15);
  auto lat = abs_lattice({0.3, 0.5}, 6);
  double folded = 0.0;
  for (auto& t : lat) folded += t.mult * t.att;
  EXPECT_NEAR(folded, box_mass(0.3, 6) * box_mass(0.5, 6), 1e-13);
  EXPECT_EQ(abs_lattice({0.0, 0.0}, 6).size(), 1u);
}

TEST(Series, CertifyRadiusReportsNonConvergence) {
  SeriesControl c{1, 1e-10, 5};
  EXPECT_THROW(certify_radius(c, [](int) { return 1.0; }, "x"), convergence_error);
  EXPECT_EQ(certify_radius(c, [](int m) { return m >= 3 ? 0.0 : 1.0; }, "x"), 3);
}

TEST(Random, DeterministicAndDistinctStreams) {
  Stream a(7, 1), b(7, 1), c(7, 2);
  for (int i = 0; i < 100; ++i) {
    auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
}

TEST(Random, SamplerMoments) {
  Stream g(42, 0);
  const int n = 200000;
  double se = 0, sp = 0, sp2 = 0, sg = 0;
  for (int i = 0; i < n; ++i) {
    se += g.exponential(2.0);
    double k = static_cast<double>(g.poisson(1.7));
    sp += k;
    sp2 += k * k;
    sg += g.gamma_int(5);
  }
  EXPECT_NEAR(se / n, 0.5, 4 * 0.5 / std::sqrt(n));
  EXPECT_NEAR(sp / n, 1.7, 4 * std::sqrt(1.7 / n));
  EXPECT_NEAR(sp2 / n - (sp / n) * (sp / n), 1.7, 0.05);
  EXPECT_NEAR(sg / n, 5.0, 4 * std::sqrt(5.0 / n));
  double big = 0;
  for (int i = 0; i < 20000; ++i) big += static_cast<double>(g.poisson(50.0));
  EXPECT_NEAR(big / 20000, 50.0, 4 * std::sqrt(50.0 / 20000));
}
