#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace specbound {

// Deterministic random stream: splitmix64 with Gaussians via Box-Muller.
// The standard library's normal_distribution is implementation-defined, so
// simulation outputs would change across toolchains; this generator is pinned
// bit-for-bit, which the Monte Carlo determinism guarantees rely on.
class RngStream {
 public:
  // Streams for distinct (seed, stream) pairs are statistically independent;
  // the Monte Carlo harness uses stream = replication index.
  RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : state_(mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^
                   mix(stream + 0xD1B54A32D192ED03ULL))) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform on (0, 1]; never returns 0 so log() below is safe.
  double next_uniform() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double next_gaussian() noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace specbound
