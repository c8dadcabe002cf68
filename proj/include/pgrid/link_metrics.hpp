// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "core.hpp"
#include "grid.hpp"
#include "laplace.hpp"
#include "series.hpp"

namespace pgrid {

struct LinkQuery {
  double theta = 1.0;
  double nu = 1.0;
  double sigma2 = 0.0;
  RoomIndex room;

  void validate(std::size_t n) const {
    if (!(theta > 0.0)) throw domain_error("LinkQuery: theta must be > 0");
    if (!(nu > 0.0)) throw domain_error("LinkQuery: nu must be > 0");
    if (!(sigma2 >= 0.0)) throw domain_error("LinkQuery: sigma2 must be >= 0");
    if (room.dim() != n) throw domain_error("LinkQuery: room dimension mismatch");
  }
};

enum class CoverageTag { Exact, UpperBound, Asymptotic };

inline const char* to_string(CoverageTag t) {
  switch (t) {
    case CoverageTag::Exact: return "exact";
    case CoverageTag::UpperBound: return "upper-bound";
    default: return "asymptotic";
  }
}

struct CoverageValue {
  double value = 0.0;
  CoverageTag tag = CoverageTag::Exact;
  double error_bound = 0.0;
};

inline double success_d2d(const LinkQuery& q, const GridParams& p, const SeriesControl& ctrl = {}) {
  p.validate();
  q.validate(p.dim());
  const double a = room_attenuation(p, q.room);
  if (a == 0.0) return 0.0;
  const double s = q.nu * q.theta / a;
  return laplace_room(s, p, Channel::Rayleigh, ctrl).value * std::exp(-s * q.sigma2);
}

// Two in-room links, one in the typical room and one in `room`. D2D transmitters use power 1/nu.
inline double joint_success_d2d(double theta, double theta2, double nu, const GridParams& p, const RoomIndex& room,
                                double sigma1, double sigma2, const SeriesControl& ctrl = {}) {
  p.validate();
  if (room.dim() != p.dim()) throw domain_error("joint_success_d2d: room dimension mismatch");
  if (room.is_origin()) throw domain_error("joint_success_d2d: links must be in distinct rooms");
  if (!(theta >= 0.0) || !(theta2 >= 0.0) || !(nu > 0.0) || !(sigma1 >= 0.0) || !(sigma2 >= 0.0))
    throw domain_error("joint_success_d2d: invalid argument");
  const double a = room_attenuation(p, room);
  const double l = joint_laplace_room(nu * theta, nu * theta2, p, room, ctrl).value;
  return l / (1.0 + theta * a) / (1.0 + theta2 * a) * std::exp(-nu * (theta * sigma1 + theta2 * sigma2));
}

namespace detail {

// Folded transverse lattice for axis j with its own radius.
inline std::vector<LatticeTerm> transverse_lattice(const GridParams& p, std::size_t j, int m) {
  std::vector<double> ks;
  for (std::size_t q = 0; q < p.dim(); ++q)
    if (q != j) ks.push_back(p.k[q]);
  return abs_lattice(ks, m);
}

inline double rayleigh_load(const std::vector<LatticeTerm>& lat, double s_outer) {
  double acc = 0.0;
  for (const auto& t : lat) {
    const double u = s_outer * t.att;
    acc += t.mult * u / (1.0 + u);
  }
  return acc;
}

}  // namespace detail

// Sum over candidate serving sites of E[1{SINR > theta}]; exact for theta > 1.
inline CoverageValue coverage_strongest(double theta, const GridParams& p, double sigma2,
                                        const SeriesControl& ctrl = {}) {
  p.validate();
  ctrl.validate();
  if (!(theta > 0.0) || !(sigma2 >= 0.0)) throw domain_error("coverage_strongest: invalid argument");
  const std::size_t n = p.dim();
  const double c = edge_multiplicity(n);
  const CoverageTag tag = theta > 1.0 ? CoverageTag::Exact : CoverageTag::UpperBound;

  std::map<long long, double> l_cache;
  auto l_user = [&](double s) {
    const long long key = std::llround(std::log(s) * 1e10);
    auto it = l_cache.find(key);
    if (it != l_cache.end()) return it->second;
    const double v = laplace_user(s, p, Channel::Rayleigh, ctrl).value;
    l_cache.emplace(key, v);
    return v;
  };

  const int max_shell = ctrl.max_radius;
  // Folded nonnegative vectors of length n-1 with a fixed l1 norm.
  auto compositions = [&](long total, std::size_t len) {
    std::vector<std::vector<long>> out;
    std::vector<long> cur(len, 0);
    std::function<void(std::size_t, long)> rec = [&](std::size_t i, long left) {
      if (i + 1 == len) {
        cur[i] = left;
        out.push_back(cur);
        return;
      }
      for (long e = 0; e <= left; ++e) {
        cur[i] = e;
        rec(i + 1, left - e);
      }
    };
    rec(0, total);
    return out;
  };
  double total = 0.0, last = std::numeric_limits<double>::infinity();
  int quiet = 0;
  for (int d = 0; d <= max_shell; ++d) {
    double shell = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (p.lambda[j] == 0.0) continue;
      std::vector<double> ks;
      for (std::size_t q = 0; q < n; ++q)
        if (q != j) ks.push_back(p.k[q]);
      for (int piece = 1; piece <= d + 1; ++piece) {
        const double along = ipow(p.k[j], piece - 1);
        if (along == 0.0) break;
        for (const auto& t : compositions(d - (piece - 1), n - 1)) {
          double att = along, mult = 2.0;
          for (std::size_t q = 0; q + 1 < n; ++q) {
            att *= ipow(ks[q], t[q]);
            if (t[q] != 0) mult *= 2.0;
          }
          if (att == 0.0) continue;
          const double s = theta / att;
          const double lu = l_user(s);
          if (lu == 0.0) continue;
          const int mw = certify_radius(
              ctrl,
              [&](int m) {
                double full = 1.0, box = 1.0;
                for (double kq : ks) {
                  full *= full_mass(kq);
                  box *= box_mass(kq, m);
                }
                return s * along * (full - box);
              },
              "coverage_strongest");
          const double w = detail::rayleigh_load(detail::transverse_lattice(p, j, mw), s * along);
          const double r = p.ratio(j);
          shell += mult * c * r * std::exp(-s * sigma2) * lu / (1.0 + c * r * w);
        }
      }
    }
    total += shell;
    if (d > 0 && shell < ctrl.tol && shell <= last) {
      if (++quiet >= 2) return {total, tag, shell};
    } else {
      quiet = 0;
    }
    last = shell;
  }
  throw convergence_error("coverage_strongest: shell sum did not settle within max_radius");
}

namespace detail {

// E[prod over BSs of weight], where BSs at graph distance < t must be absent and the rest carry
// 1/(1 + s K^dist). Requires equal losses.
inline double nearest_factor(const GridParams& p, long t, double s, const SeriesControl& ctrl) {
  const std::size_t n = p.dim();
  const double c = edge_multiplicity(n);
  const double k = p.k[0];
  auto bound = [&](int m) {
    if (m < t) return std::numeric_limits<double>::infinity();
    double b = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double full = half_mass(k) * std::pow(full_mass(k), static_cast<double>(n - 1));
      const double box = half_box_mass(k, m + 1) * std::pow(box_mass(k, m), static_cast<double>(n - 1));
      b += p.ratio(j) * 2.0 * (full - box);
    }
    return s * c * b;
  };
  SeriesControl local = ctrl;
  local.radius = std::max<int>(ctrl.radius, static_cast<int>(t));
  local.max_radius = std::max<int>(ctrl.max_radius, local.radius);
  const int m = certify_radius(local, bound, "nearest_factor");
  // Folded transverse lattice keyed by l1 norm.
  std::vector<std::pair<double, long>> lat{{1.0, 0}};
  for (std::size_t q = 1; q < n; ++q) {
    std::vector<std::pair<double, long>> next;
    for (const auto& [mult, d] : lat)
      for (long e = 0; e <= m; ++e) next.push_back({e == 0 ? mult : 2.0 * mult, d + e});
    lat.swap(next);
  }
  double log_f = 0.0;
  for (int piece = 1; piece <= m + 1; ++piece) {
    double w = 0.0;
    for (const auto& [mult, d] : lat) {
      const long dist = piece - 1 + d;
      if (dist < t) {
        w += mult;
      } else {
        const double u = s * ipow(k, dist);
        w += mult * u / (1.0 + u);
      }
    }
    for (std::size_t j = 0; j < n; ++j) log_f -= 2.0 * std::log1p(c * p.ratio(j) * w);
  }
  return std::exp(log_f);
}

// Sum over serving distance m of exp(-theta sigma2 / K^m) (F_m(theta/K^m) - F_{m+1}(theta/K^m)).
inline CoverageValue nearest_series(double theta, const GridParams& p, double sigma2, const SeriesControl& ctrl,
                                    double scale, CoverageTag tag) {
  p.validate();
  ctrl.validate();
  if (!p.equal_losses()) throw domain_error("nearest association requires equal K_i");
  if (!(theta > 0.0) || !(sigma2 >= 0.0)) throw domain_error("nearest association: invalid argument");
  const double k = p.k[0];
  double total = 0.0;
  for (long m = 0; m <= ctrl.max_radius; ++m) {
    const double a = ipow(k, m);
    if (a == 0.0) return {total, tag, 0.0};
    const double s = theta / a;
    total += scale * std::exp(-s * sigma2) * (nearest_factor(p, m, s, ctrl) - nearest_factor(p, m + 1, s, ctrl));
    const double tail = scale * nearest_factor(p, m + 1, 0.0, ctrl);
    if (tail < ctrl.tol) return {total, tag, tail};
  }
  throw convergence_error("nearest association: distance sum did not converge");
}

}  // namespace detail

// Asymptotic (lower-bound) expression that counts the serving BS's co-distance peers as fully random.
inline CoverageValue coverage_nearest_asymptotic(double theta, const GridParams& p, double sigma2,
                                                 const SeriesControl& ctrl = {}) {
  return detail::nearest_series(theta, p, sigma2, ctrl, 1.0, CoverageTag::Asymptotic);
}

// Exact nearest graph-distance association with uniform tie-breaking.
inline CoverageValue coverage_nearest(double theta, const GridParams& p, double sigma2,
                                      const SeriesControl& ctrl = {}) {
  return detail::nearest_series(theta, p, sigma2, ctrl, 1.0 + theta, CoverageTag::Exact);
}

// Side lengths of the zero cell around a user, split into pieces by the walls of a realization.
struct ZeroCellView {
  std::vector<std::vector<double>> pos;  // pieces 1, 2, ... on the positive side of each axis
  std::vector<std::vector<double>> neg;

  static ZeroCellView from(const GridRealization& g, const Point& user) {
    if (!g.inside(user)) throw domain_error("ZeroCellView: user outside window");
    ZeroCellView v;
    v.pos.resize(g.n);
    v.neg.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
      const auto& w = g.walls[i];
      auto up = std::upper_bound(w.begin(), w.end(), user[i]);
      double prev = user[i];
      for (auto it = up; it != w.end(); ++it) {
        v.pos[i].push_back(*it - prev);
        prev = *it;
      }
      auto lo = std::lower_bound(w.begin(), w.end(), user[i]);
      prev = user[i];
      for (auto it = std::make_reverse_iterator(lo); it != w.rend(); ++it) {
        v.neg[i].push_back(prev - *it);
        prev = *it;
      }
    }
    return v;
  }

  bool complete() const {
    for (std::size_t i = 0; i < pos.size(); ++i)
      if (pos[i].empty() || neg[i].empty()) return false;
    return true;
  }

  // Mean BS count in the zero cell.
  double zero_cell_mean(const GridParams& p) const {
    double m = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) m += edge_multiplicity(p.dim()) * p.lambda[i] * (pos[i][0] + neg[i][0]);
    return m;
  }
};

// E[exp(-s I) | delta = 0, walls], Rayleigh fading, frozen piece lengths.
inline double conditional_laplace_delta0(double s, const ZeroCellView& v, const GridParams& p,
                                         const SeriesControl& ctrl = {}) {
  p.validate();
  detail::check_s(s, "conditional_laplace_delta0");
  if (v.pos.size() != p.dim() || !v.complete()) throw domain_error("conditional_laplace_delta0: incomplete zero cell");
  const std::size_t n = p.dim();
  const double c = edge_multiplicity(n);
  const double lam0 = v.zero_cell_mean(p);
  if (!(lam0 > 0.0)) throw domain_error("conditional_laplace_delta0: zero cell cannot hold a BS");
  if (s == 0.0) return 1.0;

  // In-room part: sum_N (1/(1+s))^{N-1} P[N | N >= 1].
  const double ptot = -std::expm1(-lam0);
  double in_room = 0.0, pmf = std::exp(-lam0), x = 1.0 / (1.0 + s);
  for (long k = 1; k < 100000; ++k) {
    pmf *= lam0 / static_cast<double>(k);
    in_room += std::pow(x, static_cast<double>(k - 1)) * pmf / ptot;
    if (k > lam0 && pmf < 1e-18) break;
  }

  double log_out = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (p.lambda[j] == 0.0) continue;
    const int m = certify_radius(
        ctrl,
        [&](int r) {
          double full = 1.0, box = 1.0;
          for (std::size_t q = 0; q < n; ++q) {
            if (q == j) continue;
            full *= full_mass(p.k[q]);
            box *= box_mass(p.k[q], r);
          }
          double len = 0.0;
          for (double d : v.pos[j]) len += d;
          for (double d : v.neg[j]) len += d;
          return s * c * p.lambda[j] * len * (full - box);
        },
        "conditional_laplace_delta0");
    const auto lat = detail::transverse_lattice(p, j, m);
    for (const auto* side : {&v.pos[j], &v.neg[j]})
      for (std::size_t piece = 1; piece <= side->size(); ++piece) {
        const double along = ipow(p.k[j], static_cast<long>(piece) - 1);
        double w = 0.0;
        for (std::size_t idx = (piece == 1 ? 1 : 0); idx < lat.size(); ++idx) {
          const double u = s * along * lat[idx].att;
          w += lat[idx].mult * u / (1.0 + u);
        }
        log_out -= c * p.lambda[j] * (*side)[piece - 1] * w;
      }
  }
  return in_room * std::exp(log_out);
}

struct FreeSpaceParams {
  double density = 1.0;
  double alpha = 4.0;

  void validate() const {
    if (!(density > 0.0)) throw domain_error("FreeSpaceParams: density must be > 0");
    if (!(alpha > 3.0)) throw domain_error("FreeSpaceParams: alpha must be > 3");
  }
};

// SIR coverage of a 3-D PPP with nearest-BS association and Rayleigh fading.
inline double freespace_coverage(double theta, const FreeSpaceParams& fs) {
  fs.validate();
  if (!(theta > 0.0)) throw domain_error("freespace_coverage: theta must be > 0");
  const double lam = fs.density, alpha = fs.alpha;
  const double pi = std::numbers::pi;
  boost::math::quadrature::exp_sinh<double> inner_q;
  auto interference_log = [&](double r) {
    auto f = [&](double u) {
      const double x = u / r;
      return r * r / (1.0 / (x * x) + std::pow(x, alpha - 2.0) / theta);
    };
    const double near = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, r, 2.0 * r, 0, 1e-13);
    const double far = inner_q.integrate(f, 2.0 * r, std::numeric_limits<double>::infinity(), 1e-13);
    return -4.0 * pi * lam * (near + far);
  };
  auto outer = [&](double r) {
    const double vol = 4.0 / 3.0 * pi * lam * r * r * r;
    if (r == 0.0 || vol > 700.0) return 0.0;
    return 4.0 * pi * lam * r * r * std::exp(-4.0 / 3.0 * pi * lam * r * r * r + interference_log(r));
  };
  boost::math::quadrature::exp_sinh<double> outer_q;
  double err = 0.0;
  const double v = outer_q.integrate(outer, 0.0, std::numeric_limits<double>::infinity(), 1e-10, &err);
  if (!std::isfinite(v)) throw convergence_error("freespace_coverage: quadrature failed");
  return v;
}

}  // namespace pgrid
