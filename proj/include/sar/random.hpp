#pragma once

#include "sar/types.hpp"

#include <cstdint>

namespace sar {

// splitmix64 stream; self-contained so sampled values are stable across
// standard-library versions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  Scalar uniform() { return Scalar(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller, one value per call.
  Scalar normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const Scalar u1 = 1.0 - uniform();  // (0, 1]
    const Scalar u2 = uniform();
    const Scalar r = std::sqrt(-2.0 * std::log(u1));
    const Scalar t = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

 private:
  std::uint64_t state_;
  bool have_cached_ = false;
  Scalar cached_ = 0;
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  SplitMix64 s(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)));
  s.next();
  return s.next();
}

}  // namespace sar
