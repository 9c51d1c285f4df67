#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "fzlayout/geometry.hpp"

namespace fzlayout {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive an independent stream seed from a master seed and a tag.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) noexcept {
  return splitmix64(master ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

/// Seeded generator with implementation-independent sampling. std::mt19937_64
/// output is fixed by the standard; the standard distributions are not, so the
/// conversions below are done by hand.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n) {
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  Vec2 unit_vector() {
    const double angle = 2.0 * std::numbers::pi * uniform();
    return {std::cos(angle), std::sin(angle)};
  }

  /// Uniform point in the closed disk of the given radius around center.
  Vec2 in_disk(Vec2 center, double radius) {
    const double r = radius * std::sqrt(uniform());
    return center + r * unit_vector();
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace fzlayout
