// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace pgrid {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based stream: output t is mix64(key + t * golden). Streams are keyed by (seed, object id).
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t id) : key_(mix64(mix64(seed) ^ mix64(id + 0x632BE59BD9B4E019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++ctr_;
    return mix64(key_ + ctr_ * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform on (0, 1].
  double uniform() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

  double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

  // Poisson draw; `emean` must equal exp(-mean) when mean is small.
  long poisson(double mean, double emean) {
    if (mean <= 0.0) return 0;
    if (mean > 30.0) return std::poisson_distribution<long>(mean)(*this);
    double u = uniform();
    double p = emean, f = emean;
    long k = 0;
    while (u > f) {
      ++k;
      p *= mean / static_cast<double>(k);
      f += p;
      if (p < 1e-300 && k > mean) break;
    }
    return k;
  }

  long poisson(double mean) { return poisson(mean, std::exp(-mean)); }

  // Sum of n unit-mean exponentials.
  double gamma_int(long n) {
    if (n <= 0) return 0.0;
    if (n == 1) return -std::log(uniform());
    if (n <= 12) {
      double prod = 1.0;
      for (long i = 0; i < n; ++i) prod *= uniform();
      return -std::log(prod);
    }
    return std::gamma_distribution<double>(static_cast<double>(n), 1.0)(*this);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace pgrid
