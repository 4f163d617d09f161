#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace evoptim {

/// splitmix64 finalizer; used only for deriving stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of an independent child stream, derived from a master seed and a
/// stream id. Each unit model owns the stream for its own id, so results do
/// not depend on how work is scheduled across threads.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) {
  return mix64(mix64(master) ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1)));
}

/// Deterministic random stream: mt19937_64 with explicit transforms for the
/// distributions we need (53-bit uniform in [0,1), Box-Muller normal,
/// rejection-sampled bounded integers). Given a seed, the sequence of draws
/// is identical on every run. Single-owner: never share a stream between
/// threads.
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t raw() { return engine_(); }

  /// Uniform double in [0,1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  /// Standard normal via Box-Muller; the second deviate of each pair is
  /// cached, so draws come in a fixed order regardless of call site.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 < 1 always
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

  /// Unbiased integer in [0, n); n must be positive.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace evoptim
