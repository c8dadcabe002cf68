// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "pgrid/core.hpp"

namespace oracle {

// Brute-force sum over the signed lattice [-m, m]^d.
inline double lattice_sum(std::size_t d, long m, const std::function<double(const std::vector<long>&)>& f) {
  std::vector<long> idx(d, -m);
  double acc = 0.0;
  for (;;) {
    acc += f(idx);
    std::size_t q = 0;
    while (q < d && ++idx[q] > m) idx[q++] = -m;
    if (q == d) break;
  }
  return acc;
}

inline double kpow(double k, long e) { return e == 0 ? 1.0 : std::pow(k, static_cast<double>(std::labs(e))); }

// Unfolded evaluation of the typical-room transform over [-m,m]^n, no rotation helper.
inline double room_transform(double s, const pgrid::GridParams& p, pgrid::Channel ch, long m, bool user = false) {
  const std::size_t n = p.dim();
  const double c = std::ldexp(1.0, static_cast<int>(n) - 1);
  double log_l = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (long i = user ? 1 : -m; i <= m + (user ? 1 : 0); ++i) {
      double acc = lattice_sum(n - 1, m, [&](const std::vector<long>& t) {
        double a = user ? kpow(p.k[k], i - 1) : kpow(p.k[k], i);
        std::size_t f = 0;
        for (std::size_t q = 0; q < n; ++q)
          if (q != k) a *= kpow(p.k[q], t[f++]);
        const double u = s * a;
        return ch == pgrid::Channel::NoFading ? 1.0 - std::exp(-u) : u / (1.0 + u);
      });
      log_l -= (user ? 2.0 : 1.0) * std::log(1.0 + c * p.ratio(k) * acc);
    }
  }
  return std::exp(log_l);
}

}  // namespace oracle
