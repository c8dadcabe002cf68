// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <boost/math/distributions/poisson.hpp>

#include "core.hpp"
#include "laplace.hpp"
#include "series.hpp"

namespace pgrid {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Side order: (-v1, +v1, -v2, +v2, -v3, +v3); side = 2 * axis + (positive ? 1 : 0).
struct BuildingExtents {
  std::array<double, 6> d{kInf, kInf, kInf, kInf, kInf, kInf};

  void validate() const {
    for (double x : d)
      if (!(x > 0.0)) throw domain_error("BuildingExtents: extents must be > 0 or +inf");
  }
  bool finite(std::size_t side) const { return std::isfinite(d[side]); }
};

struct OobInterference {
  std::array<double, 6> power{};

  void validate() const {
    for (double x : power)
      if (!(x >= 0.0) || !std::isfinite(x)) throw domain_error("OobInterference: entries must be finite and >= 0");
  }
};

// E[prod exp(-s_i y_i)] for the n gaps cut from [0,d] by n-1 iid uniform points.
// Uniformization of the bidiagonal convolution generator; every term is nonnegative.
inline double interval_laplace(double d, const std::vector<double>& s) {
  if (!(d > 0.0) || !std::isfinite(d)) throw domain_error("interval_laplace: d must be finite and > 0");
  if (s.empty()) throw domain_error("interval_laplace: need at least one interval");
  const std::size_t n = s.size();
  double xmin = kInf, sigma = 0.0;
  for (double v : s) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw domain_error("interval_laplace: s entries must be finite and >= 0");
    xmin = std::min(xmin, v * d);
  }
  std::vector<double> diag(n);
  for (std::size_t k = 0; k < n; ++k) sigma = std::max(sigma, s[k] * d - xmin);
  if (n == 1 || sigma == 0.0) return std::exp(-xmin);
  double norm1 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    diag[k] = sigma - (s[k] * d - xmin);
    norm1 = std::max(norm1, diag[k] + (k + 1 < n ? static_cast<double>(k + 1) : 0.0));
  }

  std::vector<double> v(n, 0.0), acc(n, 0.0);
  v[0] = acc[0] = 1.0;
  double log_scale = 0.0;
  const double big = 1e250, ln_big = 250.0 * std::log(10.0);
  for (long m = 1;; ++m) {
    double mx = 0.0, l1 = 0.0;
    for (std::size_t k = n; k-- > 0;) {
      v[k] = (diag[k] * v[k] + (k > 0 ? static_cast<double>(k) * v[k - 1] : 0.0)) / static_cast<double>(m);
      acc[k] += v[k];
      mx = std::max(mx, v[k]);
      l1 += v[k];
    }
    if (mx > big) {
      for (std::size_t k = 0; k < n; ++k) {
        v[k] /= big;
        acc[k] /= big;
      }
      l1 /= big;
      log_scale += ln_big;
    }
    const double rho = norm1 / static_cast<double>(m + 1);
    if (static_cast<std::size_t>(m) + 1 >= n && rho < 0.5 && l1 * rho / (1.0 - rho) <= 1e-17 * acc[n - 1]) break;
    if (m > 50'000'000) throw convergence_error("interval_laplace: uniformization did not terminate");
  }
  if (!(acc[n - 1] > 0.0)) return 0.0;
  return std::exp(std::log(acc[n - 1]) + log_scale - sigma - xmin);
}

namespace detail {

struct Range {
  long lo;
  long hi;
};

inline std::vector<double> range_atts(double k, Range r) {
  std::vector<double> out;
  for (long j = r.lo; j <= r.hi; ++j) {
    const double a = ipow(k, std::labs(j));
    if (a != 0.0) out.push_back(a);
  }
  return out;
}

// sum over the rectangle of u/(1+u), u = s_outer * a1 * a2
inline double rect_load(double s_outer, const std::vector<double>& a1, const std::vector<double>& a2) {
  double acc = 0.0;
  for (double x : a1)
    for (double y : a2) {
      const double u = s_outer * x * y;
      acc += u / (1.0 + u);
    }
  return acc;
}

// Wall-count window [lo, hi] for N = 1 + Poisson(mean) leaving at most eps outside.
inline std::array<long, 2> count_window(double mean, double eps) {
  if (mean == 0.0) return {1, 1};
  boost::math::poisson_distribution<double> pois(mean);
  long lo = 0;
  while (boost::math::cdf(pois, static_cast<double>(lo)) <= eps / 2.0) ++lo;
  long hi = lo;
  while (boost::math::cdf(boost::math::complement(pois, static_cast<double>(hi))) > eps / 2.0) ++hi;
  return {lo + 1, hi + 1};
}

inline double count_pmf(double mean, long n) {
  if (mean == 0.0) return n == 1 ? 1.0 : 0.0;
  return boost::math::pdf(boost::math::poisson_distribution<double>(mean), static_cast<double>(n - 1));
}

inline double count_outside(double mean, std::array<long, 2> w) {
  if (mean == 0.0) return 0.0;
  boost::math::poisson_distribution<double> pois(mean);
  double out = boost::math::cdf(boost::math::complement(pois, static_cast<double>(w[1] - 1)));
  if (w[0] > 1) out += boost::math::cdf(pois, static_cast<double>(w[0] - 2));
  return out;
}

inline void require_3d_rayleigh(const GridParams& p, double s, const char* what) {
  p.validate();
  if (p.dim() != 3) throw domain_error(std::string(what) + ": requires n = 3");
  check_s(s, what);
}

}  // namespace detail

// Typical-user transform (Rayleigh) inside a box-shaped building with deterministic
// out-of-building power on each face. Infinite sides carry no wall-count sum.
inline SeriesValue finite_building_laplace(double s, const GridParams& p, const BuildingExtents& ext,
                                           const OobInterference& oob, const SeriesControl& ctrl = {}) {
  detail::require_3d_rayleigh(p, s, "finite_building_laplace");
  ext.validate();
  oob.validate();
  if (s == 0.0) return {1.0, 0.0, ctrl.radius};
  SeriesControl half = ctrl;
  half.tol = ctrl.tol / 2.0;
  const int m = certify_radius(half, [&](int r) { return detail::user_tail_bound(s, p, r); },
                               "finite_building_laplace");
  const double c = edge_multiplicity(3);

  std::vector<std::size_t> fin;
  for (std::size_t side = 0; side < 6; ++side)
    if (ext.finite(side)) fin.push_back(side);
  std::array<std::array<long, 2>, 6> win{};
  double outside = 0.0;
  double combos = 1.0;
  for (auto side : fin) {
    const double mean = p.mu[side / 2] * ext.d[side];
    win[side] = detail::count_window(mean, half.tol / static_cast<double>(fin.size()));
    outside += detail::count_outside(mean, win[side]);
    combos *= static_cast<double>(win[side][1] - win[side][0] + 1);
  }
  if (combos > 5e7) throw convergence_error("finite_building_laplace: wall-count sum too large for these extents");

  std::array<long, 6> cnt{};
  cnt.fill(-1);
  std::array<std::map<std::array<long, 5>, double>, 6> memo;

  auto side_factor = [&](std::size_t side) {
    const std::size_t a = side / 2;
    const std::size_t q1 = (a + 1) % 3 < (a + 2) % 3 ? (a + 1) % 3 : (a + 2) % 3;
    const std::size_t q2 = 3 - a - q1;
    auto range = [&](std::size_t q) {
      return detail::Range{cnt[2 * q] > 0 ? -(cnt[2 * q] - 1) : -static_cast<long>(m),
                           cnt[2 * q + 1] > 0 ? cnt[2 * q + 1] - 1 : static_cast<long>(m)};
    };
    const auto r1 = range(q1), r2 = range(q2);
    const std::array<long, 5> key{cnt[side], r1.lo, r1.hi, r2.lo, r2.hi};
    auto it = memo[side].find(key);
    if (it != memo[side].end()) return it->second;

    const auto a1 = detail::range_atts(p.k[q1], r1), a2 = detail::range_atts(p.k[q2], r2);
    auto rate = [&](long piece) {
      const double outer = ipow(p.k[a], piece - 1);
      return outer == 0.0 ? 0.0 : c * p.lambda[a] * detail::rect_load(s * outer, a1, a2);
    };
    double val;
    if (cnt[side] > 0) {
      std::vector<double> w(cnt[side]);
      for (long i = 0; i < cnt[side]; ++i) w[i] = rate(i + 1);
      val = detail::count_pmf(p.mu[a] * ext.d[side], cnt[side]) * interval_laplace(ext.d[side], w) /
            (1.0 + s * oob.power[side] * ipow(p.k[a], cnt[side]));
    } else {
      double log_v = 0.0;
      for (long i = 1; i <= m + 1; ++i) log_v -= std::log1p(rate(i) / p.mu[a]);
      val = std::exp(log_v);
    }
    memo[side].emplace(key, val);
    return val;
  };

  double total = 0.0;
  std::function<void(std::size_t)> walk = [&](std::size_t f) {
    if (f == fin.size()) {
      double prod = 1.0;
      for (std::size_t side = 0; side < 6 && prod != 0.0; ++side) prod *= side_factor(side);
      total += prod;
      return;
    }
    const auto side = fin[f];
    for (long k = win[side][0]; k <= win[side][1]; ++k) {
      cnt[side] = k;
      walk(f + 1);
    }
    cnt[side] = -1;
  };
  walk(0);
  return {total, detail::user_tail_bound(s, p, m) + outside, m};
}

// One bounded side at distance d toward -v1, all others unbounded, no outside power.
inline SeriesValue semi_infinite_laplace(double s, const GridParams& p, double d, const SeriesControl& ctrl = {}) {
  detail::require_3d_rayleigh(p, s, "semi_infinite_laplace");
  if (!(d > 0.0)) throw domain_error("semi_infinite_laplace: d must be > 0");
  if (std::isinf(d)) return laplace_user(s, p, Channel::Rayleigh, ctrl);
  if (s == 0.0) return {1.0, 0.0, ctrl.radius};
  SeriesControl half = ctrl;
  half.tol = ctrl.tol / 2.0;
  const int m = certify_radius(half, [&](int r) { return detail::user_tail_bound(s, p, r); },
                               "semi_infinite_laplace");
  const double c = edge_multiplicity(3);
  const auto win = detail::count_window(p.mu[0] * d, half.tol);
  const long nmax = win[1];
  const detail::Range box{-m, m};

  // v1 lines: pieces toward +v1 are unbounded, toward -v1 fill [0, d]
  const auto t2 = detail::range_atts(p.k[1], box), t3 = detail::range_atts(p.k[2], box);
  std::vector<double> w1(std::max<long>(nmax, m + 1));
  for (std::size_t i = 0; i < w1.size(); ++i) {
    const double outer = ipow(p.k[0], static_cast<long>(i));
    w1[i] = outer == 0.0 ? 0.0 : c * p.lambda[0] * detail::rect_load(s * outer, t2, t3);
  }
  double log_plus = 0.0;
  for (int i = 0; i <= m; ++i) log_plus -= std::log1p(w1[i] / p.mu[0]);

  // v2, v3 lines: v1 offsets run over [-(n-1), m]; loads grow one layer per extra wall
  std::array<std::vector<double>, 2> load;
  std::array<std::vector<double>, 2> other{t3, t2};
  for (int q = 0; q < 2; ++q) {
    load[q].assign(m + 1, 0.0);
    const auto a1 = detail::range_atts(p.k[0], {0, m});
    for (int piece = 0; piece <= m; ++piece) {
      const double outer = ipow(p.k[q + 1], piece);
      if (outer != 0.0) load[q][piece] = detail::rect_load(s * outer, a1, other[q]);
    }
  }
  double total = 0.0;
  for (long n = 1; n <= nmax; ++n) {
    if (n >= 2) {
      const std::vector<double> layer{ipow(p.k[0], n - 1)};
      if (layer[0] != 0.0)
        for (int q = 0; q < 2; ++q)
          for (int piece = 0; piece <= m; ++piece) {
            const double outer = ipow(p.k[q + 1], piece);
            if (outer != 0.0) load[q][piece] += detail::rect_load(s * outer, layer, other[q]);
          }
    }
    if (n < win[0]) continue;
    double log_g = 0.0;
    for (int q = 0; q < 2; ++q)
      for (int piece = 0; piece <= m; ++piece)
        log_g -= 2.0 * std::log1p(c * p.lambda[q + 1] * load[q][piece] / p.mu[q + 1]);
    const std::vector<double> w(w1.begin(), w1.begin() + n);
    total += detail::count_pmf(p.mu[0] * d, n) * interval_laplace(d, w) * std::exp(log_g);
  }
  return {total * std::exp(log_plus),
          detail::user_tail_bound(s, p, m) + detail::count_outside(p.mu[0] * d, win), m};
}

struct WindowModel {
  std::function<double(long)> level;  // l_m by graph distance m
  double lw = 0.0;                    // window loss

  static WindowModel geometric(double base, double lw) {
    return WindowModel{[base](long m) { return ipow(base, m); }, lw};
  }

  void validate() const {
    if (!level) throw domain_error("WindowModel: level function missing");
    if (!(lw >= 0.0 && lw <= 1.0)) throw domain_error("WindowModel: l_w must lie in [0,1]");
    double prev = level(0);
    if (!(prev >= 0.0 && prev <= 1.0)) throw domain_error("WindowModel: l_0 must lie in [0,1]");
    for (long m = 1; m <= 64; ++m) {
      const double l = level(m);
      if (!(l >= 0.0) || l > prev) throw domain_error("WindowModel: levels must be non-increasing and >= 0");
      prev = l;
    }
  }
};

namespace detail {

// sum_{j,k in Z} l_{|j|+|k|} and its part with |j|+|k| > M, for M = 0..mmax.
struct LevelSums {
  double full = 0.0;
  std::vector<double> tail;
};

inline LevelSums level_sums(const WindowModel& w, int mmax) {
  std::vector<double> ring{w.level(0)};
  int quiet = 0;
  for (long m = 1; quiet < 50; ++m) {
    const double t = 4.0 * static_cast<double>(m) * w.level(m);
    ring.push_back(t);
    quiet = (m > mmax && t < 1e-20) ? quiet + 1 : 0;
    if (m > 1'000'000) throw convergence_error("window model: level sums do not converge");
  }
  LevelSums out;
  out.tail.assign(mmax + 1, 0.0);
  double acc = 0.0;
  for (std::size_t m = ring.size(); m-- > 0;) {
    if (static_cast<int>(m) <= mmax) out.tail[m] = acc;
    acc += ring[m];
  }
  out.full = acc;
  return out;
}

}  // namespace detail

// Typical window room of a building occupying v1 >= 0 (room index i >= 0).
inline SeriesValue window_laplace(double s, const GridParams& p, const WindowModel& w, const SeriesControl& ctrl = {}) {
  detail::require_3d_rayleigh(p, s, "window_laplace");
  w.validate();
  if (s == 0.0) return {1.0, 0.0, ctrl.radius};
  const double c = edge_multiplicity(3);
  const auto ls = detail::level_sums(w, ctrl.max_radius);
  const double lw2 = w.lw * w.lw;
  const double h1 = half_mass(p.k[0]);
  auto bound = [&](int r) {
    const double hb = half_box_mass(p.k[0], r + 1);
    const double direct = h1 * full_mass(p.k[1]) * full_mass(p.k[2]) - hb * box_mass(p.k[1], r) * box_mass(p.k[2], r);
    const double leak = lw2 * (h1 * ls.tail[r] + (h1 - hb) * ls.full);
    return s * c * p.ratio_sum() * (direct + leak);
  };
  const int m = certify_radius(ctrl, bound, "window_laplace");

  const long side = 2 * m + 1;
  auto at = [&](long i, long j, long k) { return (i * side + (j + m)) * side + (k + m); };
  std::vector<double> term((m + 1) * side * side);
  for (long i = 0; i <= m; ++i)
    for (long j = -m; j <= m; ++j)
      for (long k = -m; k <= m; ++k) {
        const double o = ipow(p.k[0], i);
        const double u1 = s * o * ipow(p.k[1], std::labs(j)) * ipow(p.k[2], std::labs(k));
        const double u2 = s * o * w.level(std::labs(j) + std::labs(k)) * lw2;
        term[at(i, j, k)] = 1.0 - 1.0 / ((1.0 + u1) * (1.0 + u2));
      }

  double log_l = 0.0;
  for (long i = 0; i <= m && p.ratio(0) > 0.0; ++i) {
    double acc = 0.0;
    for (long j = -m; j <= m; ++j)
      for (long k = -m; k <= m; ++k) acc += term[at(i, j, k)];
    log_l -= std::log1p(c * p.ratio(0) * acc);
  }
  for (long j = -m; j <= m && p.ratio(1) > 0.0; ++j) {
    double acc = 0.0;
    for (long i = 0; i <= m; ++i)
      for (long k = -m; k <= m; ++k) acc += term[at(i, j, k)];
    log_l -= std::log1p(c * p.ratio(1) * acc);
  }
  for (long k = -m; k <= m && p.ratio(2) > 0.0; ++k) {
    double acc = 0.0;
    for (long i = 0; i <= m; ++i)
      for (long j = -m; j <= m; ++j) acc += term[at(i, j, k)];
    log_l -= std::log1p(c * p.ratio(2) * acc);
  }
  return {std::exp(log_l), bound(m), m};
}

inline double window_success(double theta, const GridParams& p, const RoomIndex& room, double sigma2,
                             const WindowModel& w, const SeriesControl& ctrl = {}) {
  if (!(theta >= 0.0)) throw domain_error("window_success: theta must be >= 0");
  if (!(sigma2 >= 0.0)) throw domain_error("window_success: sigma2 must be >= 0");
  if (room.dim() != 3 || room.idx[0] < 0) throw domain_error("window_success: room must be 3-D with i >= 0");
  if (theta == 0.0) return 1.0;
  const double a = room_attenuation(p, room);
  if (a == 0.0) return 0.0;
  return window_laplace(theta / a, p, w, ctrl).value * std::exp(-theta * sigma2 / a);
}

}  // namespace pgrid
