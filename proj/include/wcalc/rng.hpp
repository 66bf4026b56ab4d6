#pragma once

#include "wcalc/types.hpp"

#include <cmath>
#include <cstdint>

namespace wcalc {

// Counter-based generator: the n-th draw of stream s is a pure function of
// (seed, s, n), so parallel evaluation order cannot change any stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(finalize(seed) ^ finalize(0x9E3779B97F4A7C15ULL * (stream + 1))) {}

  std::uint64_t next_u64() { return finalize(base_ + 0x9E3779B97F4A7C15ULL * (++counter_)); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double normal() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  Vec normal_vec(Index d) {
    Vec z(d);
    for (Index i = 0; i < d; ++i) z[i] = normal();
    return z;
  }

  Vec uniform_vec(Index d, double lo, double hi) {
    Vec z(d);
    for (Index i = 0; i < d; ++i) z[i] = uniform(lo, hi);
    return z;
  }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace wcalc
