// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgrid {

class domain_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Channel { NoFading, Rayleigh };
enum class Perspective { TypicalRoom, TypicalUser };

inline const char* to_string(Channel c) { return c == Channel::NoFading ? "nofading" : "rayleigh"; }
inline const char* to_string(Perspective p) { return p == Perspective::TypicalRoom ? "room" : "user"; }

// Integer power with 0^0 = 1.
inline double ipow(double k, long e) {
  if (e < 0) throw domain_error("ipow: negative exponent");
  double r = 1.0, b = k;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

// 2^{n-1}: number of rooms sharing an edge line.
inline double edge_multiplicity(std::size_t n) { return std::ldexp(1.0, static_cast<int>(n) - 1); }

struct GridParams {
  std::vector<double> mu;
  std::vector<double> lambda;
  std::vector<double> k;

  std::size_t dim() const { return mu.size(); }
  double ratio(std::size_t i) const { return lambda[i] / mu[i]; }

  std::vector<double> ratios() const {
    std::vector<double> r(dim());
    for (std::size_t i = 0; i < dim(); ++i) r[i] = ratio(i);
    return r;
  }

  double ratio_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += ratio(i);
    return s;
  }

  void validate() const {
    if (mu.size() < 2) throw domain_error("GridParams: n must be >= 2");
    if (lambda.size() != mu.size() || k.size() != mu.size())
      throw domain_error("GridParams: mu, lambda, k must have length n");
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (!(mu[i] > 0.0) || !std::isfinite(mu[i])) throw domain_error("GridParams: mu_i must be > 0");
      if (!(lambda[i] >= 0.0) || !std::isfinite(lambda[i]))
        throw domain_error("GridParams: lambda_i must be >= 0");
      if (!(k[i] >= 0.0 && k[i] < 1.0)) throw domain_error("GridParams: K_i must lie in [0,1)");
    }
  }

  bool equal_losses() const {
    for (double v : k)
      if (v != k[0]) return false;
    return true;
  }

  static GridParams uniform(std::size_t n, double mu, double lambda, double k) {
    GridParams p{std::vector<double>(n, mu), std::vector<double>(n, lambda), std::vector<double>(n, k)};
    p.validate();
    return p;
  }

  GridParams scaled(double c) const {
    GridParams p = *this;
    for (std::size_t i = 0; i < dim(); ++i) {
      p.mu[i] *= c;
      p.lambda[i] *= c;
    }
    return p;
  }
};

struct RoomIndex {
  std::vector<long> idx;

  std::size_t dim() const { return idx.size(); }
  bool is_origin() const {
    for (long v : idx)
      if (v != 0) return false;
    return true;
  }
  long l1() const {
    long s = 0;
    for (long v : idx) s += std::labs(v);
    return s;
  }
  static RoomIndex origin(std::size_t n) { return RoomIndex{std::vector<long>(n, 0)}; }
  bool operator==(const RoomIndex&) const = default;
};

// Mean received power from room `room` relative to the receiver room, prod K_i^{|i|}.
inline double room_attenuation(const GridParams& p, const RoomIndex& room) {
  if (room.dim() != p.dim()) throw domain_error("room index dimension mismatch");
  double a = 1.0;
  for (std::size_t i = 0; i < p.dim(); ++i) a *= ipow(p.k[i], std::labs(room.idx[i]));
  return a;
}

// Cyclic shift (v_k, v_{k+1}, ..., v_{k-1}) with 0-based k.
template <class T>
std::vector<T> rotated(const std::vector<T>& v, std::size_t k) {
  std::vector<T> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[(i + k) % v.size()];
  return out;
}

// Mean number of BSs per unit volume.
inline double avg_density(const GridParams& p) {
  p.validate();
  double prod = 1.0;
  for (double m : p.mu) prod *= m;
  return edge_multiplicity(p.dim()) * p.ratio_sum() * prod;
}

}  // namespace pgrid
