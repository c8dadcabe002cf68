// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "core.hpp"
#include "series.hpp"

namespace pgrid {

struct LaplaceQuery {
  double s = 0.0;
  Channel channel = Channel::NoFading;
  Perspective perspective = Perspective::TypicalRoom;
  std::optional<RoomIndex> room;
  std::optional<double> s2;
};

namespace detail {

inline double one_minus_phi(Channel ch, double u) { return ch == Channel::NoFading ? -std::expm1(-u) : u / (1.0 + u); }

inline void check_s(double s, const char* what) {
  if (!(s >= 0.0) || std::isnan(s)) throw domain_error(std::string(what) + ": s must be >= 0");
}

inline double box_prod(const std::vector<double>& k, int m) {
  double v = 1.0;
  for (double x : k) v *= box_mass(x, m);
  return v;
}

inline double full_prod(const std::vector<double>& k) {
  double v = 1.0;
  for (double x : k) v *= full_mass(x);
  return v;
}

inline std::vector<double> tail(const std::vector<double>& v) { return std::vector<double>(v.begin() + 1, v.end()); }

// Sum of mult * (1 - phi(s * outer * att)) over a folded lattice.
inline double lattice_load(const std::vector<LatticeTerm>& lat, double s, double outer, Channel ch) {
  double acc = 0.0;
  for (const auto& t : lat) acc += t.mult * one_minus_phi(ch, s * outer * t.att);
  return acc;
}

// Omitted mass of the typical-user series at transverse box M and pieces 1..M+1.
inline double user_tail_bound(double s, const GridParams& p, int m) {
  const std::size_t n = p.dim();
  double b = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double full = half_mass(p.k[k]), box = half_box_mass(p.k[k], m + 1);
    for (std::size_t q = 0; q < n; ++q) {
      if (q == k) continue;
      full *= full_mass(p.k[q]);
      box *= box_mass(p.k[q], m);
    }
    b += p.ratio(k) * 2.0 * (full - box);
  }
  return s * edge_multiplicity(n) * b;
}

}  // namespace detail

inline SeriesValue laplace_room(double s, const GridParams& p, Channel ch, const SeriesControl& ctrl = {}) {
  p.validate();
  detail::check_s(s, "laplace_room");
  if (s == 0.0) return {1.0, 0.0, ctrl.radius};
  const std::size_t n = p.dim();
  const double c = edge_multiplicity(n);
  const double full = detail::full_prod(p.k);
  const double load = s * c * p.ratio_sum();
  const int m = certify_radius(ctrl, [&](int r) { return load * (full - detail::box_prod(p.k, r)); }, "laplace_room");

  double log_l = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double rk = p.ratio(k);
    if (rk == 0.0) continue;
    const auto kr = rotated(p.k, k);
    const auto lat = abs_lattice(detail::tail(kr), m);
    for (int i = 0; i <= m; ++i) {
      const double outer = ipow(kr[0], i);
      if (outer == 0.0) break;
      const double w = (i == 0) ? 1.0 : 2.0;
      log_l -= w * std::log1p(c * rk * detail::lattice_load(lat, s, outer, ch));
    }
  }
  return {std::exp(log_l), load * (full - detail::box_prod(p.k, m)), m};
}

inline SeriesValue laplace_user(double s, const GridParams& p, Channel ch, const SeriesControl& ctrl = {}) {
  p.validate();
  detail::check_s(s, "laplace_user");
  if (s == 0.0) return {1.0, 0.0, ctrl.radius};
  const std::size_t n = p.dim();
  const double c = edge_multiplicity(n);
  auto bound = [&](int r) { return detail::user_tail_bound(s, p, r); };
  const int m = certify_radius(ctrl, bound, "laplace_user");

  double log_l = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double rk = p.ratio(k);
    if (rk == 0.0) continue;
    const auto kr = rotated(p.k, k);
    const auto lat = abs_lattice(detail::tail(kr), m);
    for (int piece = 1; piece <= m + 1; ++piece) {
      const double outer = ipow(kr[0], piece - 1);
      if (outer == 0.0) break;
      log_l -= 2.0 * std::log1p(c * rk * detail::lattice_load(lat, s, outer, ch));
    }
  }
  return {std::exp(log_l), bound(m), m};
}

inline SeriesValue laplace(const LaplaceQuery& q, const GridParams& p, const SeriesControl& ctrl = {}) {
  return q.perspective == Perspective::TypicalRoom ? laplace_room(q.s, p, q.channel, ctrl)
                                                   : laplace_user(q.s, p, q.channel, ctrl);
}

// E[exp(-s1 I_0 - s2 I_l)] for the typical room and room l, Rayleigh fading.
inline SeriesValue joint_laplace_room(double s1, double s2, const GridParams& p, const RoomIndex& room,
                                      const SeriesControl& ctrl = {}) {
  p.validate();
  detail::check_s(s1, "joint_laplace_room");
  detail::check_s(s2, "joint_laplace_room");
  if (room.dim() != p.dim()) throw domain_error("joint_laplace_room: room dimension mismatch");
  if (s1 == 0.0 && s2 == 0.0) return {1.0, 0.0, ctrl.radius};
  const std::size_t n = p.dim();
  const double c = edge_multiplicity(n);
  const double full = detail::full_prod(p.k);
  const double load = (s1 + s2) * c * p.ratio_sum();
  const int m =
      certify_radius(ctrl, [&](int r) { return load * (full - detail::box_prod(p.k, r)); }, "joint_laplace_room");

  struct Site {
    double a0;
    double al;
  };
  double log_l = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double rk = p.ratio(k);
    if (rk == 0.0) continue;
    const auto kr = rotated(p.k, k);
    const auto lr = rotated(room.idx, k);
    std::vector<Site> inner{{1.0, 1.0}};
    for (std::size_t q = 1; q < n; ++q) {
      std::vector<Site> next;
      const long lo = std::min(0L, lr[q]) - m, hi = std::max(0L, lr[q]) + m;
      for (const auto& st : inner)
        for (long t = lo; t <= hi; ++t) {
          Site x{st.a0 * ipow(kr[q], std::labs(t)), st.al * ipow(kr[q], std::labs(t - lr[q]))};
          if (x.a0 != 0.0 || x.al != 0.0) next.push_back(x);
        }
      inner.swap(next);
    }
    const long lo = std::min(0L, lr[0]) - m, hi = std::max(0L, lr[0]) + m;
    for (long i = lo; i <= hi; ++i) {
      const double o0 = ipow(kr[0], std::labs(i)), ol = ipow(kr[0], std::labs(i - lr[0]));
      if (o0 == 0.0 && ol == 0.0) continue;
      double acc = 0.0;
      for (const auto& st : inner) acc += 1.0 - 1.0 / ((1.0 + s1 * o0 * st.a0) * (1.0 + s2 * ol * st.al));
      log_l -= std::log1p(c * rk * acc);
    }
  }
  return {std::exp(log_l), load * (full - detail::box_prod(p.k, m)), m};
}

}  // namespace pgrid
