#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace veploop {

/// SplitMix64 stream with counter-based substream derivation. Substreams are
/// keyed on the stream's seed rather than its consumption state, so a stream
/// can be split reproducibly no matter how much has already been drawn, and
/// work distributed across threads sees the same numbers in any schedule.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Derived stream for (tag, index...); independent of draws made so far.
  RngStream substream(std::initializer_list<std::uint64_t> path) const {
    std::uint64_t h = seed_;
    for (std::uint64_t part : path) {
      h = mix(h ^ (part + 0x9E3779B97F4A7C15ULL + (h << 12) + (h >> 4)));
    }
    return RngStream(h);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t state_;
};

/// Substream tags. Combined with indices they name every independent stream a
/// run uses, which is what makes results independent of evaluation order.
namespace stream {
inline constexpr std::uint64_t kInitialPool = 1;
inline constexpr std::uint64_t kTrial = 2;
inline constexpr std::uint64_t kEvolve = 3;
inline constexpr std::uint64_t kMutant = 4;
inline constexpr std::uint64_t kProjection = 5;
inline constexpr std::uint64_t kDotField = 6;
}  // namespace stream

}  // namespace veploop
