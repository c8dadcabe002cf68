// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "random.hpp"

namespace pgrid {

using Point = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct BaseStation {
  std::size_t axis = 0;        // axis the edge line is parallel to
  std::vector<double> fixed;   // coordinates on the other n-1 axes, in increasing axis order
  double pos = 0.0;            // coordinate along `axis`
  int room = 1;                // adjacent-room selector in {1, ..., 2^{n-1}}

  Point location(std::size_t n) const {
    Point p(n);
    std::size_t f = 0;
    for (std::size_t q = 0; q < n; ++q) p[q] = (q == axis) ? pos : fixed[f++];
    return p;
  }
};

struct GridRealization {
  std::size_t n = 0;
  std::vector<Interval> window;
  std::vector<std::vector<double>> walls;
  std::vector<BaseStation> bs;

  void validate() const {
    if (n < 2 || window.size() != n || walls.size() != n) throw domain_error("GridRealization: bad dimension");
    for (std::size_t i = 0; i < n; ++i) {
      if (!(window[i].hi > window[i].lo)) throw domain_error("GridRealization: empty window");
      for (std::size_t j = 0; j < walls[i].size(); ++j) {
        if (!window[i].contains(walls[i][j])) throw domain_error("GridRealization: wall outside window");
        if (j > 0 && !(walls[i][j] > walls[i][j - 1]))
          throw domain_error("GridRealization: wall coordinates must be strictly increasing");
      }
    }
    const int rooms = 1 << (n - 1);
    for (const auto& b : bs) {
      if (b.axis >= n || b.fixed.size() != n - 1 || b.room < 1 || b.room > rooms)
        throw domain_error("GridRealization: malformed BS record");
      std::size_t f = 0;
      for (std::size_t q = 0; q < n; ++q) {
        if (q == b.axis) continue;
        if (!std::binary_search(walls[q].begin(), walls[q].end(), b.fixed[f++]))
          throw domain_error("GridRealization: BS edge line does not lie on walls");
      }
    }
  }

  bool inside(const Point& x) const {
    if (x.size() != n) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (!window[i].contains(x[i])) return false;
    return true;
  }
};

inline GridRealization sample_realization(const GridParams& params, const std::vector<Interval>& window,
                                          std::uint64_t seed) {
  params.validate();
  const std::size_t n = params.dim();
  if (window.size() != n) throw domain_error("sample_realization: window dimension mismatch");
  for (const auto& w : window)
    if (!(w.hi > w.lo)) throw domain_error("sample_realization: empty window");

  GridRealization g;
  g.n = n;
  g.window = window;
  g.walls.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Stream rng(seed, i);
    long count = rng.poisson(params.mu[i] * window[i].length());
    auto& w = g.walls[i];
    w.reserve(count);
    for (long c = 0; c < count; ++c) w.push_back(window[i].lo + (1.0 - rng.uniform()) * window[i].length());
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
  }

  const int rooms = 1 << (n - 1);
  for (std::size_t axis = 0; axis < n; ++axis) {
    if (params.lambda[axis] == 0.0) continue;
    Stream rng(seed, 1000 + axis);
    std::vector<std::size_t> others;
    for (std::size_t q = 0; q < n; ++q)
      if (q != axis) others.push_back(q);
    bool empty = false;
    for (auto q : others) empty = empty || g.walls[q].empty();
    if (empty) continue;
    std::vector<std::size_t> ctr(others.size(), 0);
    const double len = window[axis].length();
    for (;;) {
      std::vector<double> fixed(others.size());
      for (std::size_t f = 0; f < others.size(); ++f) fixed[f] = g.walls[others[f]][ctr[f]];
      for (int room = 1; room <= rooms; ++room) {
        long count = rng.poisson(params.lambda[axis] * len);
        for (long c = 0; c < count; ++c)
          g.bs.push_back(BaseStation{axis, fixed, window[axis].lo + (1.0 - rng.uniform()) * len, room});
      }
      std::size_t f = 0;
      while (f < others.size() && ++ctr[f] == g.walls[others[f]].size()) ctr[f++] = 0;
      if (f == others.size()) break;
    }
  }
  return g;
}

// Walls strictly between x and y on each axis.
inline std::vector<long> wall_counts(const Point& x, const Point& y, const GridRealization& g) {
  if (!g.inside(x) || !g.inside(y)) throw domain_error("wall_counts: point outside window");
  std::vector<long> c(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double lo = std::min(x[i], y[i]), hi = std::max(x[i], y[i]);
    const auto& w = g.walls[i];
    auto a = std::upper_bound(w.begin(), w.end(), lo);
    auto b = std::lower_bound(w.begin(), w.end(), hi);
    c[i] = b > a ? static_cast<long>(b - a) : 0;
  }
  return c;
}

// Walls between a BS (placed in its selected adjacent room) and a receiver at y.
inline std::vector<long> bs_wall_counts(const BaseStation& b, const Point& y, const GridRealization& g) {
  Point x = b.location(g.n);
  auto c = wall_counts(x, y, g);
  std::size_t f = 0;
  for (std::size_t q = 0; q < g.n; ++q) {
    if (q == b.axis) continue;
    const bool positive_side = ((b.room - 1) >> f) & 1;
    const double w = b.fixed[f++];
    if ((positive_side && y[q] < w) || (!positive_side && y[q] > w)) ++c[q];
  }
  return c;
}

inline double blockage_gain(const std::vector<long>& counts, const GridParams& params) {
  double a = 1.0;
  for (std::size_t i = 0; i < counts.size(); ++i) a *= ipow(params.k[i], counts[i]);
  return a;
}

inline double path_gain(const Point& x, const Point& y, const GridRealization& g, const GridParams& params,
                        Channel ch, std::uint64_t seed) {
  const double a = blockage_gain(wall_counts(x, y, g), params);
  if (ch == Channel::NoFading) return a;
  Stream rng(seed, 0);
  return a * rng.exponential();
}

inline nlohmann::json to_json(const GridRealization& g) {
  nlohmann::json j;
  j["format"] = "pgrid-realization";
  j["version"] = 1;
  j["n"] = g.n;
  j["window"] = nlohmann::json::array();
  for (const auto& w : g.window) j["window"].push_back({w.lo, w.hi});
  j["walls"] = g.walls;
  j["bs"] = nlohmann::json::array();
  for (const auto& b : g.bs)
    j["bs"].push_back({{"axis", b.axis}, {"fixed", b.fixed}, {"pos", b.pos}, {"room", b.room}});
  return j;
}

inline GridRealization realization_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "pgrid-realization" || j.value("version", 0) != 1)
    throw domain_error("realization: unsupported format or version");
  GridRealization g;
  g.n = j.at("n").get<std::size_t>();
  for (const auto& w : j.at("window")) g.window.push_back(Interval{w.at(0).get<double>(), w.at(1).get<double>()});
  g.walls = j.at("walls").get<std::vector<std::vector<double>>>();
  for (const auto& b : j.at("bs"))
    g.bs.push_back(BaseStation{b.at("axis").get<std::size_t>(), b.at("fixed").get<std::vector<double>>(),
                               b.at("pos").get<double>(), b.at("room").get<int>()});
  g.validate();
  return g;
}

}  // namespace pgrid
