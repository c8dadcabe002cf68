// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core.hpp"

namespace pgrid {

struct SeriesControl {
  int radius = 8;
  double tol = 1e-10;
  int max_radius = 200;

  void validate() const {
    if (radius < 1) throw domain_error("SeriesControl: radius must be >= 1");
    if (!(tol > 0.0)) throw domain_error("SeriesControl: tol must be > 0");
    if (max_radius < radius) throw domain_error("SeriesControl: max_radius must be >= radius");
  }
};

struct SeriesValue {
  double value = 0.0;
  double error_bound = 0.0;
  int radius = 0;
  operator double() const { return value; }
};

// sum_{i in Z} K^{|i|}
inline double full_mass(double k) { return (1.0 + k) / (1.0 - k); }
// sum_{|i| <= M} K^{|i|}
inline double box_mass(double k, int m) { return (1.0 + k - 2.0 * ipow(k, m + 1)) / (1.0 - k); }
// sum_{p >= 1} K^{p-1}
inline double half_mass(double k) { return 1.0 / (1.0 - k); }
// sum_{p = 1..P} K^{p-1}
inline double half_box_mass(double k, int p) { return (1.0 - ipow(k, p)) / (1.0 - k); }

// Smallest radius in [ctrl.radius, ctrl.max_radius] whose tail bound is below ctrl.tol.
inline int certify_radius(const SeriesControl& ctrl, const std::function<double(int)>& bound, const char* what) {
  ctrl.validate();
  for (int m = ctrl.radius; m <= ctrl.max_radius; ++m)
    if (bound(m) <= ctrl.tol) return m;
  throw convergence_error(std::string(what) + ": tail bound above tol at max_radius");
}

struct LatticeTerm {
  double att;
  double mult;
};

// Nonnegative index vectors in [0,M]^d folded by sign symmetry: att = prod K_q^{m_q},
// mult = 2^{#nonzero m_q}. Zero-attenuation entries are dropped.
inline std::vector<LatticeTerm> abs_lattice(const std::vector<double>& k, int m) {
  std::vector<LatticeTerm> out{{1.0, 1.0}};
  for (double kq : k) {
    std::vector<LatticeTerm> next;
    next.reserve(out.size() * (m + 1));
    for (const auto& t : out) {
      double a = t.att;
      next.push_back(t);
      for (int e = 1; e <= m; ++e) {
        a *= kq;
        if (a == 0.0) break;
        next.push_back({a, 2.0 * t.mult});
      }
    }
    out.swap(next);
  }
  return out;
}

}  // namespace pgrid
