#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pspline {

/// Seedable Gaussian source with independent substreams.
///
/// A stream is identified by (seed, path) where the path is folded through
/// SplitMix64, so stream (seed, i) never depends on how many numbers other
/// streams consumed. Draws come from std::mt19937_64; uniforms take the top
/// 53 bits, and normals use the Box-Muller transform (both outputs used in
/// order). The sequence is therefore fixed for a given seed on every
/// platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : RandomStream(seed, mix(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t key() const noexcept { return key_; }

  /// Child stream `index`; deterministic and independent of this stream's state.
  RandomStream substream(std::uint64_t index) const {
    return RandomStream(seed_, mix(key_ ^ mix(index + 0x632be59bd9b4e019ULL)));
  }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal deviate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  RandomStream(std::uint64_t seed, std::uint64_t key) : seed_(seed), key_(key), engine_(key) {}

  std::uint64_t seed_;
  std::uint64_t key_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pspline
