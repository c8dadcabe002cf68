// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "core.hpp"
#include "finite.hpp"
#include "grid.hpp"
#include "link_metrics.hpp"
#include "random.hpp"
#include "series.hpp"

namespace pgrid {

struct SimConfig {
  long samples = 100000;
  std::uint64_t seed = 1;
  int window_halfwidth = 0;      // rooms per axis around the receiver; 0 picks it from tail_fraction
  double tail_fraction = 1e-5;   // excluded share of the mean interference
  long batch_size = 4096;
  unsigned workers = 0;          // 0 = hardware concurrency
  Perspective perspective = Perspective::TypicalRoom;

  void validate() const {
    if (samples < 1) throw domain_error("SimConfig: samples must be >= 1");
    if (window_halfwidth < 0) throw domain_error("SimConfig: window_halfwidth must be >= 0");
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) throw domain_error("SimConfig: tail_fraction must lie in (0,1)");
    if (batch_size < 1) throw domain_error("SimConfig: batch_size must be >= 1");
  }
};

struct Estimate {
  double point = 0.0;
  double std_error = 0.0;
  long samples = 0;

  std::array<double, 2> ci95() const { return {point - 1.96 * std_error, point + 1.96 * std_error}; }
  bool within(double x, double sigmas = 3.0) const { return std::abs(x - point) <= sigmas * std_error; }
};

inline Estimate mean_estimate(const std::vector<double>& x) {
  const long n = static_cast<long>(x.size());
  if (n == 0) return {};
  long double s = 0.0L;
  for (double v : x) s += v;
  const long double m = s / n;
  long double q = 0.0L;
  for (double v : x) q += (v - m) * (v - m);
  const double var = n > 1 ? static_cast<double>(q / (n - 1)) : 0.0;
  return {static_cast<double>(m), std::sqrt(var / n), n};
}

// Unbiased sample variance; standard error from the fourth central moment.
inline Estimate variance_estimate(const std::vector<double>& x) {
  const long n = static_cast<long>(x.size());
  if (n < 2) return {0.0, 0.0, n};
  long double s = 0.0L;
  for (double v : x) s += v;
  const long double m = s / n;
  long double m2 = 0.0L, m4 = 0.0L;
  for (double v : x) {
    const long double d = v - m, d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  const long double var = m2 / (n - 1), c2 = m2 / n, c4 = m4 / n;
  const long double se2 = std::max(0.0L, (c4 - c2 * c2) / n);
  return {static_cast<double>(var), static_cast<double>(std::sqrt(se2)), n};
}

inline Estimate covariance_estimate(const std::vector<double>& x, const std::vector<double>& y) {
  const long n = static_cast<long>(x.size());
  if (n < 2 || y.size() != x.size()) throw domain_error("covariance_estimate: need two equal-length samples");
  long double sx = 0.0L, sy = 0.0L;
  for (long i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const long double mx = sx / n, my = sy / n;
  std::vector<double> prod(n);
  for (long i = 0; i < n; ++i) prod[i] = static_cast<double>((x[i] - mx) * (y[i] - my));
  Estimate e = mean_estimate(prod);
  e.point *= static_cast<double>(n) / (n - 1);
  return e;
}

// Point is the raw frequency; the standard error is the Wilson half-width over 1.96.
inline Estimate proportion_estimate(long hits, long n) {
  if (n <= 0) return {};
  const double z = 1.96, p = static_cast<double>(hits) / n, nn = static_cast<double>(n);
  const double half = z / (1.0 + z * z / nn) * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
  return {p, half / z, n};
}

namespace detail {

using SampleRow = std::array<double, 6>;

template <class F>
std::vector<SampleRow> run_batches(const SimConfig& cfg, std::uint64_t salt, F&& per_batch_sampler) {
  const long nb = (cfg.samples + cfg.batch_size - 1) / cfg.batch_size;
  std::vector<SampleRow> out(cfg.samples);
  std::atomic<long> next{0};
  auto work = [&] {
    for (long b = next++; b < nb; b = next++) {
      Stream rng(cfg.seed ^ mix64(salt), static_cast<std::uint64_t>(b));
      const long lo = b * cfg.batch_size, hi = std::min(cfg.samples, lo + cfg.batch_size);
      auto sample = per_batch_sampler();
      for (long i = lo; i < hi; ++i) out[i] = sample(rng);
    }
  };
  unsigned w = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  w = static_cast<unsigned>(std::min<long>(w, nb));
  if (w <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < w; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return out;
}

// Room lengths along each axis, indexed from lo[a]; 0 marks a room that does not exist.
struct Lengths {
  std::vector<std::vector<double>> len;
  std::vector<long> exist_lo, exist_hi;
  std::vector<long> walls_neg, walls_pos;  // walls up to a bounded face, counted when the face exists
};

struct Scenario {
  GridParams params;
  std::function<std::array<double, 2>(const std::vector<long>&)> att;  // (a0, a1) for a room index
  std::function<long(const std::vector<long>&)> delta;
  std::function<double(std::size_t, long)> mean_len;
  std::function<std::pair<long, long>(std::size_t, int)> box;  // room index range per axis at radius R
  std::function<void(Stream&, const std::vector<long>&, const std::vector<long>&, Lengths&)> lengths;
  double total = 0.0;  // mean of sum over all rooms of (a0 + a1)
  bool foldable = true;
};

struct Layout {
  std::size_t n = 0;
  std::vector<long> lo, hi;
  struct Line {
    std::size_t axis;
    long along;
    std::size_t first, last;
    double rate;  // 2^{n-1} lambda_axis
  };
  std::vector<Line> lines;
  std::vector<double> a0, a1, mult;
  std::vector<long> delta;
  std::vector<long> trans;  // n-1 transverse indices per class (unfolded layouts)
  double excluded_fraction = 0.0;
  int radius = 0;
  std::vector<std::string> warnings;
};

inline Layout build_layout(const Scenario& sc, const SimConfig& cfg) {
  const auto& p = sc.params;
  const std::size_t n = p.dim();
  const double c = edge_multiplicity(n);
  struct Site {
    double weight, a0, a1;
    long delta;
    std::size_t axis;
    std::vector<long> idx;
  };
  Layout lay;
  lay.n = n;
  const bool fixed = cfg.window_halfwidth > 0;
  int r = fixed ? cfg.window_halfwidth : 4;
  for (;;) {
    std::vector<Site> sites;
    lay.lo.assign(n, 0);
    lay.hi.assign(n, 0);
    double rooms = 1.0;
    for (std::size_t a = 0; a < n; ++a) {
      auto [l, h] = sc.box(a, r);
      lay.lo[a] = l;
      lay.hi[a] = h;
      rooms *= static_cast<double>(h - l + 1);
    }
    if (rooms > 2e7) throw convergence_error("montecarlo: site box too large; raise tail_fraction or set window_halfwidth");
    std::vector<long> idx(lay.lo);
    for (;;) {
      const auto at = sc.att(idx);
      if (at[0] > 0.0 || at[1] > 0.0)
        for (std::size_t a = 0; a < n; ++a) {
          if (p.lambda[a] == 0.0) continue;
          const double w = c * p.lambda[a] * sc.mean_len(a, idx[a]) * (at[0] + at[1]);
          if (w > 0.0) sites.push_back({w, at[0], at[1], sc.delta(idx), a, idx});
        }
      std::size_t q = 0;
      for (; q < n; ++q) {
        if (++idx[q] <= lay.hi[q]) break;
        idx[q] = lay.lo[q];
      }
      if (q == n) break;
    }
    std::sort(sites.begin(), sites.end(), [](const Site& x, const Site& y) {
      if (x.weight != y.weight) return x.weight > y.weight;
      if (x.axis != y.axis) return x.axis < y.axis;
      return x.idx < y.idx;
    });
    const double target = cfg.tail_fraction * sc.total;
    double cum = 0.0;
    std::size_t keep = 0;
    while (keep < sites.size() && sc.total - cum > target) cum += sites[keep++].weight;
    // keep ties together so the layout does not depend on the sort order of equal weights
    while (keep > 0 && keep < sites.size() && sites[keep].weight == sites[keep - 1].weight) cum += sites[keep++].weight;
    const double excluded = sc.total > 0.0 ? std::max(0.0, sc.total - cum) / sc.total : 0.0;
    if (excluded > cfg.tail_fraction && !fixed && r < 400) {
      r = static_cast<int>(std::ceil(r * 1.5));
      continue;
    }
    lay.excluded_fraction = excluded;
    lay.radius = r;
    if (excluded > 1e-3)
      lay.warnings.push_back("window inadequate: excluded mean fraction " + std::to_string(excluded) + " > 0.1%");
    sites.resize(keep);
    std::sort(sites.begin(), sites.end(), [](const Site& x, const Site& y) {
      if (x.axis != y.axis) return x.axis < y.axis;
      if (x.idx[x.axis] != y.idx[y.axis]) return x.idx[x.axis] < y.idx[y.axis];
      if (x.a0 != y.a0) return x.a0 > y.a0;
      if (x.a1 != y.a1) return x.a1 > y.a1;
      if (x.delta != y.delta) return x.delta < y.delta;
      return x.idx < y.idx;
    });
    for (std::size_t i = 0; i < sites.size();) {
      const auto& s0 = sites[i];
      Layout::Line line{s0.axis, s0.idx[s0.axis], lay.a0.size(), 0, c * p.lambda[s0.axis]};
      std::size_t j = i;
      while (j < sites.size() && sites[j].axis == s0.axis && sites[j].idx[s0.axis] == s0.idx[s0.axis]) {
        const auto& s = sites[j];
        const bool merge = sc.foldable && lay.a0.size() > line.first && lay.a0.back() == s.a0 &&
                           lay.a1.back() == s.a1 && lay.delta.back() == s.delta;
        if (merge) {
          lay.mult.back() += 1.0;
        } else {
          lay.a0.push_back(s.a0);
          lay.a1.push_back(s.a1);
          lay.mult.push_back(1.0);
          lay.delta.push_back(s.delta);
          for (std::size_t q = 0; q < n; ++q)
            if (q != s.axis) lay.trans.push_back(s.idx[q]);
        }
        ++j;
      }
      line.last = lay.a0.size();
      lay.lines.push_back(line);
      i = j;
    }
    if (sc.foldable) lay.trans.clear();
    return lay;
  }
}

enum class Reduce { SumNoFade, SumRayleigh, PairNoFade, PairRayleigh, DualPath, Strongest, Nearest, Delta0 };

struct SamplerOptions {
  Reduce reduce = Reduce::SumRayleigh;
  int extra_exponentials = 0;                 // appended to slots 2.. after the reduction
  std::array<double, 6> oob{};                // per-face outside power (finite building)
};

// Per-sample draw: room lengths, per-class Poisson counts, then the reduction.
inline std::function<SampleRow(Stream&)> make_sampler(const Scenario& sc, const Layout& lay, const SamplerOptions& opt) {
  return [&sc, &lay, opt, lens = Lengths{}, counts = std::vector<long>(lay.a0.size())](Stream& rng) mutable {
    sc.lengths(rng, lay.lo, lay.hi, lens);
    const std::size_t n = lay.n;
    const bool unfolded = !lay.trans.empty() || !sc.foldable;
    for (const auto& line : lay.lines) {
      const double len = lens.len[line.axis][line.along - lay.lo[line.axis]];
      for (std::size_t k = line.first; k < line.last; ++k) {
        counts[k] = 0;
        if (len == 0.0) continue;
        if (unfolded) {
          bool inside = true;
          std::size_t f = 0;
          for (std::size_t q = 0; q < n && inside; ++q) {
            if (q == line.axis) continue;
            const long t = lay.trans[k * (n - 1) + f++];
            inside = t >= lens.exist_lo[q] && t <= lens.exist_hi[q];
          }
          if (!inside) continue;
        }
        counts[k] = rng.poisson(line.rate * len * lay.mult[k]);
      }
    }
    SampleRow row{};
    switch (opt.reduce) {
      case Reduce::SumNoFade:
      case Reduce::PairNoFade:
        for (std::size_t k = 0; k < counts.size(); ++k) {
          row[0] += counts[k] * lay.a0[k];
          row[1] += counts[k] * lay.a1[k];
        }
        break;
      case Reduce::SumRayleigh:
        for (std::size_t k = 0; k < counts.size(); ++k)
          if (counts[k]) row[0] += rng.gamma_int(counts[k]) * lay.a0[k];
        break;
      case Reduce::PairRayleigh:
      case Reduce::DualPath:
        for (std::size_t k = 0; k < counts.size(); ++k)
          if (counts[k]) {
            if (lay.a0[k] > 0.0) row[0] += rng.gamma_int(counts[k]) * lay.a0[k];
            if (lay.a1[k] > 0.0) row[1] += rng.gamma_int(counts[k]) * lay.a1[k];
          }
        if (opt.reduce == Reduce::DualPath) {
          row[0] += row[1];
          row[1] = 0.0;
        }
        break;
      case Reduce::Strongest:
        for (std::size_t k = 0; k < counts.size(); ++k)
          for (long b = 0; b < counts[k]; ++b) {
            const double x = rng.exponential() * lay.a0[k];
            row[1] += x;
            row[0] = std::max(row[0], x);
          }
        break;
      case Reduce::Nearest: {
        long dmin = -1, at_min = 0;
        for (std::size_t k = 0; k < counts.size(); ++k)
          if (counts[k] && lay.a0[k] > 0.0 && (dmin < 0 || lay.delta[k] < dmin)) dmin = lay.delta[k];
        for (std::size_t k = 0; k < counts.size(); ++k)
          if (lay.delta[k] == dmin && lay.a0[k] > 0.0) at_min += counts[k];
        // serving BS uniform among those at the minimal graph distance
        long pick = at_min > 0 ? std::min<long>(at_min - 1, static_cast<long>(rng.uniform() * at_min)) : -1;
        for (std::size_t k = 0; k < counts.size(); ++k) {
          if (!counts[k]) continue;
          long rest = counts[k];
          if (pick >= 0 && lay.delta[k] == dmin && lay.a0[k] > 0.0) {
            if (pick < counts[k]) {
              row[0] = rng.exponential() * lay.a0[k];
              --rest;
            }
            pick -= counts[k];
          }
          if (rest) row[1] += rng.gamma_int(rest) * lay.a0[k];
        }
        break;
      }
      case Reduce::Delta0: {
        long n0 = 0;
        for (std::size_t k = 0; k < counts.size(); ++k)
          if (lay.delta[k] == 0) n0 += counts[k];
        while (n0 == 0) {
          for (const auto& line : lay.lines) {
            const double len = lens.len[line.axis][line.along - lay.lo[line.axis]];
            for (std::size_t k = line.first; k < line.last; ++k)
              if (lay.delta[k] == 0 && len > 0.0) {
                counts[k] = rng.poisson(line.rate * len * lay.mult[k]);
                n0 += counts[k];
              }
          }
        }
        for (std::size_t k = 0; k < counts.size(); ++k)
          if (counts[k] && lay.delta[k] != 0) row[0] += rng.gamma_int(counts[k]) * lay.a0[k];
        row[0] += rng.gamma_int(n0 - 1);
        break;
      }
    }
    for (std::size_t f = 0; f < 6; ++f)
      if (opt.oob[f] > 0.0) {
        const long walls = (f % 2 == 0) ? lens.walls_neg[f / 2] : lens.walls_pos[f / 2];
        if (walls > 0) row[0] += opt.oob[f] * ipow(sc.params.k[f / 2], walls) * rng.exponential();
      }
    for (int e = 0; e < opt.extra_exponentials; ++e) row[2 + e] = rng.exponential();
    return row;
  };
}

inline void reset_lengths(const std::vector<long>& lo, const std::vector<long>& hi, Lengths& out) {
  const std::size_t n = lo.size();
  out.len.resize(n);
  for (std::size_t a = 0; a < n; ++a) out.len[a].assign(hi[a] - lo[a] + 1, 0.0);
  out.exist_lo.assign(n, std::numeric_limits<long>::min());
  out.exist_hi.assign(n, std::numeric_limits<long>::max());
  out.walls_neg.assign(n, 0);
  out.walls_pos.assign(n, 0);
}

inline double lattice_total(const GridParams& p, bool user) {
  const std::size_t n = p.dim();
  double t = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double along = full_mass(p.k[a]) + (user ? 1.0 : 0.0);
    for (std::size_t q = 0; q < n; ++q)
      if (q != a) along *= full_mass(p.k[q]);
    t += edge_multiplicity(n) * p.ratio(a) * along;
  }
  return t;
}

inline long l1_delta(const std::vector<long>& idx) {
  long d = 0;
  for (long v : idx) d += std::labs(v);
  return d;
}

// Whole grid around the typical room or the typical user; optional second receiver room.
inline Scenario infinite_scenario(const GridParams& p, Perspective persp, const std::optional<RoomIndex>& second) {
  Scenario sc;
  sc.params = p;
  const bool user = persp == Perspective::TypicalUser;
  const std::size_t n = p.dim();
  sc.att = [p, second, n](const std::vector<long>& idx) {
    double a0 = 1.0, a1 = second ? 1.0 : 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      a0 *= ipow(p.k[q], std::labs(idx[q]));
      if (second) a1 *= ipow(p.k[q], std::labs(idx[q] - second->idx[q]));
    }
    return std::array<double, 2>{a0, a1};
  };
  sc.delta = l1_delta;
  sc.mean_len = [p, user](std::size_t a, long i) { return (user && i == 0 ? 2.0 : 1.0) / p.mu[a]; };
  sc.box = [second](std::size_t a, int r) {
    const long off = second ? second->idx[a] : 0;
    return std::pair<long, long>{std::min(0L, off) - r, std::max(0L, off) + r};
  };
  sc.lengths = [p, user](Stream& rng, const std::vector<long>& lo, const std::vector<long>& hi, Lengths& out) {
    reset_lengths(lo, hi, out);
    for (std::size_t a = 0; a < lo.size(); ++a)
      for (long i = lo[a]; i <= hi[a]; ++i) {
        double x = rng.exponential(p.mu[a]);
        if (user && i == 0) x += rng.exponential(p.mu[a]);
        out.len[a][i - lo[a]] = x;
      }
  };
  sc.total = lattice_total(p, user) * (second ? 2.0 : 1.0);
  return sc;
}

// Typical user inside a building bounded on some sides; rooms beyond a face do not exist.
inline Scenario building_scenario(const GridParams& p, const BuildingExtents& ext) {
  Scenario sc = infinite_scenario(p, Perspective::TypicalUser, std::nullopt);
  sc.foldable = false;
  sc.lengths = [p, ext](Stream& rng, const std::vector<long>& lo, const std::vector<long>& hi, Lengths& out) {
    reset_lengths(lo, hi, out);
    for (std::size_t a = 0; a < lo.size(); ++a) {
      for (int side = 0; side < 2; ++side) {
        const double d = ext.d[2 * a + side];
        const long dir = side == 0 ? -1 : 1;
        double used = 0.0;
        for (long i = 0;; ++i) {
          const long room = dir * i;
          const bool in_box = room >= lo[a] && room <= hi[a];
          if (!in_box && std::isinf(d)) break;
          const double gap = rng.exponential(p.mu[a]);
          const bool last = used + gap >= d;
          const double piece = last ? d - used : gap;
          used += piece;
          if (in_box) out.len[a][room - lo[a]] += piece;
          if (last) {
            (side == 0 ? out.exist_lo[a] : out.exist_hi[a]) = room;
            (side == 0 ? out.walls_neg[a] : out.walls_pos[a]) = i + 1;
            break;
          }
        }
      }
    }
  };
  return sc;
}

inline Scenario window_scenario(const GridParams& p, const WindowModel& w) {
  Scenario sc = infinite_scenario(p, Perspective::TypicalRoom, std::nullopt);
  const double lw2 = w.lw * w.lw;
  sc.att = [p, w, lw2](const std::vector<long>& idx) {
    const double o = ipow(p.k[0], idx[0]);
    return std::array<double, 2>{o * ipow(p.k[1], std::labs(idx[1])) * ipow(p.k[2], std::labs(idx[2])),
                                 o * w.level(std::labs(idx[1]) + std::labs(idx[2])) * lw2};
  };
  sc.box = [](std::size_t a, int r) { return std::pair<long, long>{a == 0 ? 0 : -r, r}; };
  const double h1 = half_mass(p.k[0]);
  sc.total = edge_multiplicity(3) * p.ratio_sum() * h1 *
             (full_mass(p.k[1]) * full_mass(p.k[2]) + lw2 * level_sums(w, 0).full);
  return sc;
}

// Frozen piece lengths around a user; rooms beyond the known pieces carry no BSs.
inline Scenario delta0_scenario(const GridParams& p, const ZeroCellView& v) {
  Scenario sc = infinite_scenario(p, Perspective::TypicalRoom, std::nullopt);
  const std::size_t n = p.dim();
  auto piece = [v](std::size_t a, long i) {
    if (i == 0) return v.pos[a][0] + v.neg[a][0];
    const auto& side = i > 0 ? v.pos[a] : v.neg[a];
    const std::size_t k = static_cast<std::size_t>(std::labs(i));
    return k < side.size() ? side[k] : 0.0;
  };
  sc.mean_len = piece;
  sc.lengths = [piece](Stream&, const std::vector<long>& lo, const std::vector<long>& hi, Lengths& out) {
    if (!out.len.empty()) return;
    reset_lengths(lo, hi, out);
    for (std::size_t a = 0; a < lo.size(); ++a)
      for (long i = lo[a]; i <= hi[a]; ++i) out.len[a][i - lo[a]] = piece(a, i);
  };
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double along = 0.0;
    for (std::size_t k = 0; k < v.pos[a].size(); ++k) along += v.pos[a][k] * ipow(p.k[a], static_cast<long>(k));
    for (std::size_t k = 1; k < v.neg[a].size(); ++k) along += v.neg[a][k] * ipow(p.k[a], static_cast<long>(k));
    along += v.neg[a][0];
    for (std::size_t q = 0; q < n; ++q)
      if (q != a) along *= full_mass(p.k[q]);
    total += edge_multiplicity(n) * p.lambda[a] * along;
  }
  sc.total = total;
  return sc;
}

struct Run {
  std::vector<SampleRow> rows;
  double excluded_fraction = 0.0;
  int radius = 0;
  std::vector<std::string> warnings;
};

inline Run run_scenario(const Scenario& sc, const SimConfig& cfg, const SamplerOptions& opt, std::uint64_t salt) {
  cfg.validate();
  const Layout lay = build_layout(sc, cfg);
  Run r;
  r.rows = run_batches(cfg, salt, [&] { return make_sampler(sc, lay, opt); });
  r.excluded_fraction = lay.excluded_fraction;
  r.radius = lay.radius;
  r.warnings = lay.warnings;
  return r;
}

template <class F>
std::vector<Estimate> threshold_curve(const std::vector<SampleRow>& rows, const std::vector<double>& thetas, F&& ok) {
  std::vector<Estimate> out;
  for (double t : thetas) {
    long hits = 0;
    for (const auto& r : rows) hits += ok(r, t) ? 1 : 0;
    out.push_back(proportion_estimate(hits, static_cast<long>(rows.size())));
  }
  return out;
}

}  // namespace detail

struct InterferenceRun {
  std::vector<double> i0, i1;
  double excluded_fraction = 0.0;
  int radius = 0;
  std::vector<std::string> warnings;

  Estimate mean() const { return mean_estimate(i0); }
  Estimate variance() const { return variance_estimate(i0); }
  Estimate covariance() const { return covariance_estimate(i0, i1); }
  Estimate laplace(double s) const {
    std::vector<double> e(i0.size());
    for (std::size_t k = 0; k < i0.size(); ++k) e[k] = std::exp(-s * i0[k]);
    return mean_estimate(e);
  }
};

namespace detail {
inline InterferenceRun to_interference(Run&& r, bool pair) {
  InterferenceRun out;
  out.i0.reserve(r.rows.size());
  for (const auto& row : r.rows) out.i0.push_back(row[0]);
  if (pair) {
    out.i1.reserve(r.rows.size());
    for (const auto& row : r.rows) out.i1.push_back(row[1]);
  }
  out.excluded_fraction = r.excluded_fraction;
  out.radius = r.radius;
  out.warnings = std::move(r.warnings);
  return out;
}
}  // namespace detail

// Interference samples at the typical room or typical user (cfg.perspective).
inline InterferenceRun sim_interference(const GridParams& p, const SimConfig& cfg, Channel ch) {
  p.validate();
  const auto sc = detail::infinite_scenario(p, cfg.perspective, std::nullopt);
  detail::SamplerOptions opt;
  opt.reduce = ch == Channel::NoFading ? detail::Reduce::SumNoFade : detail::Reduce::SumRayleigh;
  return detail::to_interference(detail::run_scenario(sc, cfg, opt, 11), false);
}

// Interference at the typical room and at `room` on shared realizations.
inline InterferenceRun sim_pair_interference(const GridParams& p, const SimConfig& cfg, const RoomIndex& room,
                                             Channel ch = Channel::NoFading) {
  p.validate();
  if (room.dim() != p.dim()) throw domain_error("sim_pair_interference: room dimension mismatch");
  const auto sc = detail::infinite_scenario(p, Perspective::TypicalRoom, room);
  detail::SamplerOptions opt;
  opt.reduce = ch == Channel::NoFading ? detail::Reduce::PairNoFade : detail::Reduce::PairRayleigh;
  return detail::to_interference(detail::run_scenario(sc, cfg, opt, 12), true);
}

enum class SuccessMode { D2DSingle, D2DJoint, Strongest, Nearest };

struct SuccessQuery {
  SuccessMode mode = SuccessMode::D2DSingle;
  std::optional<RoomIndex> room;  // D2D link room (single) or second link room (joint)
  double nu = 1.0;
  double sigma2 = 0.0;
  std::optional<double> theta2;   // joint mode; defaults to the swept theta
};

struct SuccessRun {
  std::vector<Estimate> curve;
  double excluded_fraction = 0.0;
  std::vector<std::string> warnings;
};

// Empirical success / coverage frequency over a theta grid, common random numbers across theta.
inline SuccessRun sim_success(const GridParams& p, const SimConfig& cfg, const SuccessQuery& q,
                              const std::vector<double>& thetas) {
  p.validate();
  if (!(q.nu > 0.0) || !(q.sigma2 >= 0.0)) throw domain_error("sim_success: invalid query");
  const std::size_t n = p.dim();
  const RoomIndex room = q.room.value_or(RoomIndex::origin(n));
  if (room.dim() != n) throw domain_error("sim_success: room dimension mismatch");
  SimConfig c = cfg;
  detail::SamplerOptions opt;
  std::optional<RoomIndex> second;
  std::uint64_t salt = 20;
  switch (q.mode) {
    case SuccessMode::D2DSingle:
      c.perspective = Perspective::TypicalRoom;
      opt.reduce = detail::Reduce::SumRayleigh;
      opt.extra_exponentials = 1;
      break;
    case SuccessMode::D2DJoint:
      if (room.is_origin()) throw domain_error("sim_success: joint links must be in distinct rooms");
      c.perspective = Perspective::TypicalRoom;
      opt.reduce = detail::Reduce::PairRayleigh;
      opt.extra_exponentials = 4;
      second = room;
      salt = 21;
      break;
    case SuccessMode::Strongest:
      c.perspective = Perspective::TypicalUser;
      opt.reduce = detail::Reduce::Strongest;
      salt = 22;
      break;
    case SuccessMode::Nearest:
      c.perspective = Perspective::TypicalUser;
      opt.reduce = detail::Reduce::Nearest;
      salt = 23;
      break;
  }
  const auto sc = detail::infinite_scenario(p, c.perspective, second);
  auto run = detail::run_scenario(sc, c, opt, salt);
  SuccessRun out;
  out.excluded_fraction = run.excluded_fraction;
  out.warnings = run.warnings;
  const double a = room_attenuation(p, room), nu = q.nu, s2 = q.sigma2;
  switch (q.mode) {
    case SuccessMode::D2DSingle:
      out.curve = detail::threshold_curve(run.rows, thetas, [&](const detail::SampleRow& r, double t) {
        return r[2] * a / nu > t * (r[0] + s2);
      });
      break;
    case SuccessMode::D2DJoint:
      out.curve = detail::threshold_curve(run.rows, thetas, [&](const detail::SampleRow& r, double t) {
        const double t2 = q.theta2.value_or(t);
        return r[2] / nu > t * (r[0] + r[4] * a / nu + s2) && r[3] / nu > t2 * (r[1] + r[5] * a / nu + s2);
      });
      break;
    case SuccessMode::Strongest:
      out.curve = detail::threshold_curve(run.rows, thetas, [&](const detail::SampleRow& r, double t) {
        return r[0] > 0.0 && r[0] > t * (r[1] - r[0] + s2);
      });
      break;
    case SuccessMode::Nearest:
      out.curve = detail::threshold_curve(run.rows, thetas, [&](const detail::SampleRow& r, double t) {
        return r[0] > 0.0 && r[0] > t * (r[1] + s2);
      });
      break;
  }
  return out;
}

// Typical-user interference (Rayleigh) in a building bounded on some sides, plus faded outside power.
inline InterferenceRun sim_finite_building(const GridParams& p, const SimConfig& cfg, const BuildingExtents& ext,
                                           const OobInterference& oob = {}) {
  p.validate();
  if (p.dim() != 3) throw domain_error("sim_finite_building: requires n = 3");
  ext.validate();
  oob.validate();
  const auto sc = detail::building_scenario(p, ext);
  detail::SamplerOptions opt;
  opt.reduce = detail::Reduce::SumRayleigh;
  opt.oob = oob.power;
  SimConfig c = cfg;
  c.perspective = Perspective::TypicalUser;
  return detail::to_interference(detail::run_scenario(sc, c, opt, 30), false);
}

inline InterferenceRun sim_semi_infinite(const GridParams& p, const SimConfig& cfg, double d) {
  BuildingExtents ext;
  ext.d[0] = d;
  return sim_finite_building(p, cfg, ext);
}

// Window-room interference: direct path plus an independently faded outside path per BS.
inline InterferenceRun sim_window(const GridParams& p, const SimConfig& cfg, const WindowModel& w) {
  p.validate();
  if (p.dim() != 3) throw domain_error("sim_window: requires n = 3");
  w.validate();
  const auto sc = detail::window_scenario(p, w);
  detail::SamplerOptions opt;
  opt.reduce = detail::Reduce::DualPath;
  opt.extra_exponentials = 1;
  SimConfig c = cfg;
  c.perspective = Perspective::TypicalRoom;
  auto run = detail::run_scenario(sc, c, opt, 31);
  auto out = detail::to_interference(std::move(run), false);
  return out;
}

inline std::vector<Estimate> sim_window_success(const GridParams& p, const SimConfig& cfg, const WindowModel& w,
                                                const RoomIndex& room, const std::vector<double>& thetas,
                                                double sigma2 = 0.0) {
  p.validate();
  if (p.dim() != 3 || room.dim() != 3) throw domain_error("sim_window_success: requires n = 3");
  const double a = room_attenuation(p, room);
  w.validate();
  const auto sc = detail::window_scenario(p, w);
  detail::SamplerOptions opt;
  opt.reduce = detail::Reduce::DualPath;
  opt.extra_exponentials = 1;
  SimConfig c = cfg;
  c.perspective = Perspective::TypicalRoom;
  auto run = detail::run_scenario(sc, c, opt, 32);
  return detail::threshold_curve(run.rows, thetas,
                                 [&](const detail::SampleRow& r, double t) { return r[2] * a > t * (r[0] + sigma2); });
}

// Interference given that the zero cell holds the serving BS, walls frozen as in `v`.
inline InterferenceRun sim_conditional_delta0(const ZeroCellView& v, const GridParams& p, const SimConfig& cfg) {
  p.validate();
  if (v.pos.size() != p.dim() || !v.complete()) throw domain_error("sim_conditional_delta0: incomplete zero cell");
  if (!(v.zero_cell_mean(p) > 0.0)) throw domain_error("sim_conditional_delta0: zero cell cannot hold a BS");
  const auto sc = detail::delta0_scenario(p, v);
  detail::SamplerOptions opt;
  opt.reduce = detail::Reduce::Delta0;
  return detail::to_interference(detail::run_scenario(sc, cfg, opt, 33), false);
}

// SIR coverage of a 3-D PPP with nearest association: the first `points` BSs by distance are
// explicit, the rest enter through their mean.
inline std::vector<Estimate> sim_freespace(const FreeSpaceParams& fs, const SimConfig& cfg,
                                           const std::vector<double>& thetas, int points = 1000) {
  fs.validate();
  cfg.validate();
  if (points < 2) throw domain_error("sim_freespace: need at least 2 points");
  const double lam = fs.density, alpha = fs.alpha, pi = std::numbers::pi;
  auto rows = detail::run_batches(cfg, 40, [&] {
    return [&](Stream& rng) {
      double vol = 0.0, signal = 0.0, interf = 0.0, r = 0.0;
      for (int k = 0; k < points; ++k) {
        vol += rng.exponential(lam);
        r = std::cbrt(3.0 * vol / (4.0 * pi));
        const double x = rng.exponential() * std::pow(r, -alpha);
        if (k == 0)
          signal = x;
        else
          interf += x;
      }
      interf += 4.0 * pi * lam * std::pow(r, 3.0 - alpha) / (alpha - 3.0);
      return detail::SampleRow{signal, interf, 0, 0, 0, 0};
    };
  });
  return detail::threshold_curve(rows, thetas,
                                 [](const detail::SampleRow& r, double t) { return r[0] > t * r[1]; });
}

// Slow cross-check: sample a whole grid in [-h, h]^n and sum path gains at the origin.
inline InterferenceRun sim_interference_fullgrid(const GridParams& p, const SimConfig& cfg, Channel ch, double h) {
  p.validate();
  cfg.validate();
  if (!(h > 0.0)) throw domain_error("sim_interference_fullgrid: half-width must be > 0");
  const std::size_t n = p.dim();
  const std::vector<Interval> window(n, Interval{-h, h});
  auto rows = detail::run_batches(cfg, 50, [&] {
    return [&](Stream& rng) {
      const auto g = sample_realization(p, window, rng());
      const Point origin(n, 0.0);
      double acc = 0.0;
      for (const auto& b : g.bs) {
        const double a = blockage_gain(bs_wall_counts(b, origin, g), p);
        acc += ch == Channel::NoFading ? a : a * rng.exponential();
      }
      return detail::SampleRow{acc, 0, 0, 0, 0, 0};
    };
  });
  InterferenceRun out;
  for (const auto& r : rows) out.i0.push_back(r[0]);
  return out;
}

}  // namespace pgrid
