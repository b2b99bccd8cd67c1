#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "qcurv/constants.hpp"

namespace qcurv {

// splitmix64; hand-rolled so streams are stable across standard libraries.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1].
  double uniform_pos() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Substream keyed by index; pure function of (seed, index) so sample i is
  // the same no matter which worker draws it.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    Rng mix(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    mix.next_u64();
    return Rng(mix.next_u64());
  }

  // Uniform direction on S^{n-1}, padded with zeros above n.
  std::array<double, kMaxDim> unit_vector(int n) {
    std::array<double, kMaxDim> v{};
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int i = 0; i < n; ++i) {
        v[i] = normal();
        norm2 += v[i] * v[i];
      }
    } while (norm2 < 1e-30);
    const double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < n; ++i) v[i] *= inv;
    return v;
  }
};

}  // namespace qcurv
