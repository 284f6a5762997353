#pragma once

#include <cmath>
#include <cstdint>

namespace dbi {

/// SplitMix64 generator (Vigna, public domain constants). Chosen because the
/// update rule is fully specified here, so streams reproduce bit-identically
/// on every platform and compiler.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Unbiased integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t threshold = (0) - bound; // 2^64 mod bound, step 1
      const std::uint64_t t = threshold % bound;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal via Box-Muller (pairwise, second value cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stable seed derivation: substream `index` of `master`. Mask l of a run
/// uses derive_seed(master_seed, l), so mask sets are reproducible and can
/// be extended without disturbing earlier indices.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 g(master ^ (0xD2B74407B1CE6E93ULL * (index + 1)));
  g.next();
  return g.next();
}

} // namespace dbi
