// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "core.hpp"
#include "series.hpp"

namespace pgrid {

struct MomentReport {
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> covariance;
  std::optional<double> corr_coeff;
};

namespace detail {

inline double a_coef(double k) { return full_mass(k) * full_mass(k); }
inline double b_coef(double k, long x) {
  const long m = std::labs(x);
  return ipow(k, m) * (static_cast<double>(m) + (1.0 + k * k) / (1.0 - k * k));
}
inline void require_3d(const GridParams& p, const char* what) {
  p.validate();
  if (p.dim() != 3) throw domain_error(std::string(what) + ": requires n = 3");
}

}  // namespace detail

// (sum_i K^{|i|+|i-k|}, sum_{i != j} K^{|i|+|j-k|})
inline std::pair<double, double> geom_sums(double k, long shift) {
  if (!(k >= 0.0 && k < 1.0)) throw domain_error("geom_sums: K must lie in [0,1)");
  if (shift < 0) throw domain_error("geom_sums: k must be >= 0");
  const double s1 = detail::b_coef(k, shift);
  return {s1, detail::a_coef(k) - s1};
}

inline double mean_room(const GridParams& p) {
  p.validate();
  double prod = 1.0;
  for (double k : p.k) prod *= full_mass(k);
  return edge_multiplicity(p.dim()) * p.ratio_sum() * prod;
}

inline double joint_moment_room(const GridParams& p, const RoomIndex& room) {
  p.validate();
  if (room.dim() != p.dim()) throw domain_error("joint_moment_room: room dimension mismatch");
  const std::size_t n = p.dim();
  const double c = edge_multiplicity(n);
  double prod_b = 1.0, prod_a = 1.0, cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    prod_b *= detail::b_coef(p.k[i], room.idx[i]);
    prod_a *= detail::a_coef(p.k[i]);
    cross += p.ratio(i) * p.ratio(i) * detail::b_coef(p.k[i], room.idx[i]) / detail::a_coef(p.k[i]);
  }
  const double rs = p.ratio_sum();
  return c * rs * prod_b + c * c * prod_a * (rs * rs + cross);
}

inline double variance_room(const GridParams& p) {
  const double m = mean_room(p);
  return joint_moment_room(p, RoomIndex::origin(p.dim())) - m * m;
}

inline double covariance_room(const GridParams& p, const RoomIndex& room) {
  const long double m = mean_room(p);
  return static_cast<double>(static_cast<long double>(joint_moment_room(p, room)) - m * m);
}

inline double corr_coeff(const GridParams& p, const RoomIndex& room) {
  const long double m = mean_room(p);
  const long double var = static_cast<long double>(joint_moment_room(p, RoomIndex::origin(p.dim()))) - m * m;
  if (!(var > 0.0L)) throw domain_error("corr_coeff: zero variance");
  const long double cov = static_cast<long double>(joint_moment_room(p, room)) - m * m;
  return static_cast<double>(cov / var);
}

inline double mean_user(const GridParams& p) {
  p.validate();
  double prod = 1.0, sum = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    prod *= full_mass(p.k[i]);
    sum += p.ratio(i) * 2.0 / (1.0 + p.k[i]);
  }
  return edge_multiplicity(p.dim()) * prod * sum;
}

// Second cumulant of the typical-user transform, any n.
inline double variance_user(const GridParams& p) {
  p.validate();
  const std::size_t n = p.dim();
  const double c = edge_multiplicity(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double pa2 = 1.0, pb = 1.0;
    for (std::size_t q = 0; q < n; ++q) {
      if (q == k) continue;
      pa2 *= detail::a_coef(p.k[q]);
      pb *= (1.0 + p.k[q] * p.k[q]) / (1.0 - p.k[q] * p.k[q]);
    }
    const double r = p.ratio(k), kk = p.k[k];
    total += 2.0 * (c * r * pb + c * c * r * r * pa2) / (1.0 - kk * kk);
  }
  return total;
}

inline double uncorr_mean_user_3d(const GridParams& p) {
  detail::require_3d(p, "uncorr_mean_user_3d");
  boost::math::quadrature::exp_sinh<double> integrator;
  double total = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    if (p.lambda[j] == 0.0) continue;
    const double rate = p.mu[j] * (1.0 - p.k[j]);
    const double half = integrator.integrate([rate](double x) { return std::exp(-rate * x); }, 0.0,
                                             std::numeric_limits<double>::infinity());
    double leak = 4.0;
    for (std::size_t q = 0; q < 3; ++q)
      if (q != j) leak *= full_mass(p.k[q]);
    total += p.lambda[j] * 2.0 * half * leak;
  }
  return total;
}

inline double var_user_corr_3d(const GridParams& p) {
  detail::require_3d(p, "var_user_corr_3d");
  double pa = 1.0, pb = 1.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double k = p.k[i], r = p.ratio(i);
    pa *= full_mass(k);
    pb *= (1.0 + k * k) / (1.0 - k * k);
    s1 += 32.0 * (1.0 - k) / ((1.0 + k) * (1.0 + k) * (1.0 + k)) * r * r;
    s2 += 8.0 / (1.0 + k * k) * r;
  }
  return pa * pa * s1 + pb * s2;
}

inline double var_user_uncorr_3d(const GridParams& p) {
  detail::require_3d(p, "var_user_uncorr_3d");
  double pb = 1.0, s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double k = p.k[i];
    pb *= (1.0 + k * k) / (1.0 - k * k);
    s += p.ratio(i) * (1.0 + k) / (1.0 + k * k);
  }
  return 4.0 * pb * s;
}

inline double variance_ratio_3d(const GridParams& p) {
  detail::require_3d(p, "variance_ratio_3d");
  if (p.lambda[1] != 0.0 || p.lambda[2] != 0.0)
    throw domain_error("variance_ratio_3d: requires lambda_2 = lambda_3 = 0");
  auto f = [](double k) { return (1.0 + k) * (1.0 + k) * (1.0 + k) / ((1.0 - k) * (1.0 + k * k)); };
  return 2.0 / (1.0 + p.k[0]) * (1.0 + 4.0 * p.ratio(0) * f(p.k[1]) * f(p.k[2]));
}

inline MomentReport moments_room(const GridParams& p, const std::optional<RoomIndex>& room = std::nullopt) {
  MomentReport m{mean_room(p), variance_room(p), std::nullopt, std::nullopt};
  if (room) {
    m.covariance = covariance_room(p, *room);
    if (m.variance > 0.0) m.corr_coeff = corr_coeff(p, *room);
  }
  return m;
}

inline MomentReport moments_user(const GridParams& p) { return {mean_user(p), variance_user(p), {}, {}}; }

}  // namespace pgrid
