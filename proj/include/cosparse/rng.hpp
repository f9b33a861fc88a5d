#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

#include <Eigen/Dense>

#include "cosparse/errors.hpp"

namespace cosparse::rng {

// splitmix64 output function. Used to expand seeds and to hash child-stream
// keys; never used as the main generator.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Splittable counter-free PRNG: xoshiro256++ seeded through splitmix64.
// Streams are identified by a 64-bit key; child streams are derived by
// hashing (key, k0, k1, ...) so that disjoint key tuples give statistically
// independent streams. All outputs are reproducible bit-for-bit across
// platforms for a fixed seed, which the experiment harness relies on.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : key_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  // Key this stream was created from. Child derivation folds further keys
  // into it, so the tree of streams is addressable by integer tuples.
  std::uint64_t key() const { return key_; }

  // Derive an independent stream addressed by (this stream's key, keys...).
  Stream child(std::initializer_list<std::uint64_t> keys) const {
    std::uint64_t h = key_;
    std::uint64_t sm = h;
    for (std::uint64_t k : keys) {
      sm = h ^ (k + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
      h = splitmix64_next(sm);
    }
    return Stream(h);
  }

  Stream child(std::uint64_t k0) const { return child({k0}); }
  Stream child(std::uint64_t k0, std::uint64_t k1) const { return child({k0, k1}); }
  Stream child(std::uint64_t k0, std::uint64_t k1, std::uint64_t k2) const {
    return child({k0, k1, k2});
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw InvalidArgument("uniform_index needs n > 0");
    // Rejection to kill modulo bias; at most a few retries in practice.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  // Standard normal via Box-Muller; consumes two uniforms per pair and
  // caches the second value.
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
  std::uint64_t key_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

inline Eigen::VectorXd gaussian_vector(Stream& stream, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = stream.gaussian();
  return v;
}

inline Eigen::MatrixXd gaussian_matrix(Stream& stream, Eigen::Index rows, Eigen::Index cols) {
  // Row-major fill order so the draw sequence is part of the contract.
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = stream.gaussian();
  return m;
}

// Uniform direction on the unit sphere S^{n-1}.
inline Eigen::VectorXd sphere_vector(Stream& stream, Eigen::Index n) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigen::VectorXd v = gaussian_vector(stream, n);
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
  throw DegenerateDraw("could not draw a nonzero Gaussian vector for sphere sampling");
}

}  // namespace cosparse::rng
