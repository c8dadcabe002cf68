#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pgrid/laplace.hpp"
#include "pgrid/moments.hpp"
#include "pgrid/montecarlo.hpp"

using namespace pgrid;

namespace {

SimConfig cfg(long samples, std::uint64_t seed = 7, Perspective persp = Perspective::TypicalRoom) {
  SimConfig c;
  c.samples = samples;
  c.seed = seed;
  c.perspective = persp;
  c.workers = 1;
  return c;
}

// Kolmogorov-Smirnov statistic of x against the cdf F.
template <class F>
double ks_stat(std::vector<double> x, F&& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

}  // namespace

TEST(SimInterference, NoBaseStations) {
  auto run = sim_interference(GridParams::uniform(3, 1.0, 0.0, 0.3), cfg(2000), Channel::Rayleigh);
  for (double x : run.i0) EXPECT_EQ(x, 0.0);
}

TEST(SimInterference, MomentsAtZeroK) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.0);
  auto run = sim_interference(p, cfg(100000), Channel::NoFading);
  EXPECT_TRUE(run.mean().within(1.2)) << run.mean().point;
  EXPECT_TRUE(run.variance().within(1.68)) << run.variance().point;
  EXPECT_TRUE(run.warnings.empty());
}

TEST(SimInterference, MatchesMomentsAtPositiveK) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.3);
  auto room = sim_interference(p, cfg(40000), Channel::NoFading);
  EXPECT_TRUE(room.mean().within(mean_room(p))) << room.mean().point << " " << mean_room(p);
  EXPECT_TRUE(room.variance().within(variance_room(p))) << room.variance().point << " " << variance_room(p);
  auto user = sim_interference(p, cfg(40000, 8, Perspective::TypicalUser), Channel::NoFading);
  EXPECT_TRUE(user.mean().within(mean_user(p))) << user.mean().point << " " << mean_user(p);
  EXPECT_TRUE(user.variance().within(variance_user(p))) << user.variance().point << " " << variance_user(p);
}

TEST(SimInterference, FellerSeparation) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.3);
  auto room = sim_interference(p, cfg(50000), Channel::NoFading).mean();
  auto user = sim_interference(p, cfg(50000, 9, Perspective::TypicalUser), Channel::NoFading).mean();
  EXPECT_GT(user.point - room.point, 3.0 * std::hypot(user.std_error, room.std_error));
}

TEST(SimInterference, RayleighLaplace) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.3);
  auto room = sim_interference(p, cfg(50000), Channel::Rayleigh);
  auto user = sim_interference(p, cfg(50000, 3, Perspective::TypicalUser), Channel::Rayleigh);
  for (double s : {0.1, 1.0}) {
    EXPECT_TRUE(room.laplace(s).within(laplace_room(s, p, Channel::Rayleigh)));
    EXPECT_TRUE(user.laplace(s).within(laplace_user(s, p, Channel::Rayleigh)));
  }
}

TEST(SimInterference, DeterministicAcrossWorkers) {
  const auto p = GridParams::uniform(2, 1.0, 0.1, 0.3);
  auto a = cfg(5000);
  a.batch_size = 256;
  auto b = a;
  b.workers = 4;
  EXPECT_EQ(sim_interference(p, a, Channel::Rayleigh).i0, sim_interference(p, b, Channel::Rayleigh).i0);
  auto c = a;
  c.seed = 8;
  EXPECT_NE(sim_interference(p, a, Channel::Rayleigh).i0, sim_interference(p, c, Channel::Rayleigh).i0);
}

TEST(SimInterference, FixedWindowWarns) {
  auto c = cfg(100);
  c.window_halfwidth = 1;
  auto run = sim_interference(GridParams::uniform(3, 1.0, 0.1, 0.5), c, Channel::NoFading);
  EXPECT_GT(run.excluded_fraction, 1e-3);
  EXPECT_FALSE(run.warnings.empty());
}

TEST(SimInterference, SideLengthLaws) {
  const auto p = GridParams::uniform(2, 1.5, 0.1, 0.3);
  const std::vector<long> lo{-1, -1}, hi{1, 1};
  const int n = 10000;
  // 1.63 / sqrt(n) is the 1% critical value
  const double crit = 1.63 / std::sqrt(static_cast<double>(n));
  for (auto persp : {Perspective::TypicalRoom, Perspective::TypicalUser}) {
    const auto sc = detail::infinite_scenario(p, persp, std::nullopt);
    Stream rng(5, 0);
    std::vector<double> zero, side;
    for (int i = 0; i < n; ++i) {
      detail::Lengths l;
      sc.lengths(rng, lo, hi, l);
      zero.push_back(l.len[0][1]);
      side.push_back(l.len[1][2]);
    }
    auto expo = [&](double x) { return -std::expm1(-1.5 * x); };
    auto erlang = [&](double x) { return 1.0 - std::exp(-1.5 * x) * (1.0 + 1.5 * x); };
    EXPECT_LT(ks_stat(side, expo), crit);
    if (persp == Perspective::TypicalRoom)
      EXPECT_LT(ks_stat(zero, expo), crit);
    else
      EXPECT_LT(ks_stat(zero, erlang), crit);
  }
}

TEST(SimPair, OriginCovarianceIsVariance) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.3);
  auto run = sim_pair_interference(p, cfg(5000), RoomIndex::origin(3));
  EXPECT_EQ(run.i0, run.i1);
  EXPECT_NEAR(run.covariance().point, run.variance().point, 1e-12 * run.variance().point);
}

TEST(SimPair, CovarianceAtZeroK) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.0);
  auto near = sim_pair_interference(p, cfg(100000), RoomIndex{{0, 0, 5}}).covariance();
  EXPECT_GT(near.point, 3.0 * near.std_error);
  EXPECT_TRUE(near.within(covariance_room(p, RoomIndex{{0, 0, 5}})));
  auto far = sim_pair_interference(p, cfg(100000, 4), RoomIndex{{5, 5, 5}}).covariance();
  EXPECT_TRUE(far.within(covariance_room(p, RoomIndex{{5, 5, 5}}))) << far.point;
}

TEST(SimPair, JointLaplace) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.3);
  const RoomIndex room{{1, 0, 0}};
  auto run = sim_pair_interference(p, cfg(40000), room, Channel::Rayleigh);
  std::vector<double> e(run.i0.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::exp(-run.i0[i] - run.i1[i]);
  EXPECT_TRUE(mean_estimate(e).within(joint_laplace_room(1.0, 1.0, p, room)));
}

TEST(SimSuccess, D2DEmptyRoomLimit) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.0);
  SuccessQuery q;
  auto run = sim_success(p, cfg(100000), q, {1e-9, db_to_linear(30.0)});
  EXPECT_EQ(run.curve[0].point, 1.0);
  EXPECT_TRUE(run.curve[1].within(std::pow(1.0 / 1.4, 3)));
}

TEST(SimSuccess, D2DMatchesAnalytic) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.3);
  SuccessQuery q;
  q.room = RoomIndex{{1, 0, 0}};
  q.sigma2 = 0.05;
  const std::vector<double> th{0.1, 1.0};
  auto run = sim_success(p, cfg(40000), q, th);
  for (std::size_t i = 0; i < th.size(); ++i) {
    LinkQuery lq{th[i], 1.0, 0.05, *q.room};
    EXPECT_TRUE(run.curve[i].within(success_d2d(lq, p))) << run.curve[i].point << " " << success_d2d(lq, p);
  }
}

TEST(SimSuccess, JointMatchesAnalytic) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.3);
  SuccessQuery q;
  q.mode = SuccessMode::D2DJoint;
  q.room = RoomIndex{{1, 1, 1}};
  auto run = sim_success(p, cfg(40000), q, {1.0});
  const double ref = joint_success_d2d(1.0, 1.0, 1.0, p, *q.room, 0.0, 0.0);
  EXPECT_TRUE(run.curve[0].within(ref)) << run.curve[0].point << " " << ref;
  q.room = RoomIndex::origin(3);
  EXPECT_THROW(sim_success(p, cfg(10), q, {1.0}), domain_error);
}

TEST(SimSuccess, StrongestAboveNearest) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.1);
  const std::vector<double> th{0.5, 1.0, 2.0, 4.0, 8.0};
  SuccessQuery s, nq;
  s.mode = SuccessMode::Strongest;
  nq.mode = SuccessMode::Nearest;
  auto a = sim_success(p, cfg(30000), s, th).curve;
  auto b = sim_success(p, cfg(30000), nq, th).curve;
  for (std::size_t i = 0; i < th.size(); ++i) {
    EXPECT_GE(a[i].point + 3.0 * a[i].std_error, b[i].point);
    if (i) {
      EXPECT_LE(a[i].point, a[i - 1].point);
    }
  }
}

TEST(SimFreeSpace, ScaleInvarianceAndQuadrature) {
  const std::vector<double> th{1.0};
  auto lo = sim_freespace({0.1, 4.0}, cfg(20000), th)[0];
  auto hi = sim_freespace({1.0, 4.0}, cfg(20000, 2), th)[0];
  EXPECT_LE(std::abs(lo.point - hi.point), 3.0 * std::hypot(lo.std_error, hi.std_error));
  EXPECT_TRUE(hi.within(freespace_coverage(1.0, {1.0, 4.0}))) << hi.point;
  EXPECT_EQ(sim_freespace({1.0, 4.0}, cfg(100), {1e-12})[0].point, 1.0);
}

TEST(SimFinite, SemiInfiniteMatchesAnalytic) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.3);
  auto run = sim_semi_infinite(p, cfg(40000), 3.0);
  EXPECT_TRUE(run.laplace(1.0).within(semi_infinite_laplace(1.0, p, 3.0))) << run.laplace(1.0).point;
}

TEST(SimFinite, BoundedBuildingMatchesAnalytic) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.3);
  BuildingExtents ext;
  ext.d = {2.0, 3.0, kInf, 1.5, 2.5, kInf};
  OobInterference oob;
  oob.power = {0.0, 2.0, 0.0, 1.0, 0.5, 0.0};
  auto run = sim_finite_building(p, cfg(40000), ext, oob);
  const double ref = finite_building_laplace(1.0, p, ext, oob);
  EXPECT_TRUE(run.laplace(1.0).within(ref)) << run.laplace(1.0).point << " " << ref;
}

TEST(SimWindow, LaplaceAndSuccess) {
  GridParams p = GridParams::uniform(3, 1.0, 0.1, 0.3);
  p.k[2] = 0.0;
  const auto w = WindowModel::geometric(0.5, std::sqrt(0.5));
  auto run = sim_window(p, cfg(40000), w);
  EXPECT_TRUE(run.laplace(1.0).within(window_laplace(1.0, p, w))) << run.laplace(1.0).point;
  const RoomIndex room{{1, 0, 0}};
  auto succ = sim_window_success(p, cfg(40000), w, room, {1.0}, 0.01)[0];
  EXPECT_TRUE(succ.within(window_success(1.0, p, room, 0.01, w))) << succ.point;
}

TEST(SimConditional, DeltaZero) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.3);
  const auto g = sample_realization(p, std::vector<Interval>(3, Interval{-8, 8}), 21);
  const auto v = ZeroCellView::from(g, {0.1, -0.2, 0.3});
  auto run = sim_conditional_delta0(v, p, cfg(40000));
  const double ref = conditional_laplace_delta0(1.0, v, p);
  EXPECT_TRUE(run.laplace(1.0).within(ref)) << run.laplace(1.0).point << " " << ref;
}

TEST(SimFullGrid, AgreesWithRoomCountSampler) {
  const auto p = GridParams::uniform(3, 1.0, 0.1, 0.1);
  auto full = sim_interference_fullgrid(p, cfg(1500), Channel::NoFading, 6.0);
  EXPECT_TRUE(full.mean().within(mean_user(p))) << full.mean().point << " " << mean_user(p);
}
