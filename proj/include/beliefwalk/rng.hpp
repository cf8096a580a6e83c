#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

#include "beliefwalk/error.hpp"

namespace beliefwalk {

// splitmix64: seed expander and label hash. Used to derive independent
// substreams from (seed, cell labels) so simulation output does not depend on
// how work is sharded across threads.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = seed ^ (0x632be59bd9b4e019ULL + salt);
  std::uint64_t a = splitmix64_next(s);
  return a ^ splitmix64_next(s);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return mix_seed(seed, h);
}

// xoshiro256**. Hand-rolled samplers keep byte-level reproducibility
// independent of standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64_next(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [lo, hi] inclusive
  int uniform_int(int lo, int hi) {
    const int span = hi - lo + 1;
    return lo + static_cast<int>(uniform01() * span);
  }

  double exponential(double rate) {
    if (!(rate > 0)) throw parameter_error("exponential rate must be positive");
    return -std::log1p(-uniform01()) / rate;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  int binomial(int n, double p) {
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += bernoulli(p) ? 1 : 0;
    return hits;
  }

  // index into a nonnegative weight array; weights need not be normalized
  template <typename Weights>
  int categorical(const Weights& weights, int count) {
    double total = 0;
    for (int i = 0; i < count; ++i) total += weights[i];
    double u = uniform01() * total;
    for (int i = 0; i < count; ++i) {
      u -= weights[i];
      if (u < 0) return i;
    }
    return count - 1;
  }

  double normal() {
    // Box-Muller, fresh pair per call; the spare is discarded to keep call
    // sites order-independent.
    double u1 = uniform01();
    while (u1 <= 0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace beliefwalk
