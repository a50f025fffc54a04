#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <string_view>

namespace stablelab {

/// SplitMix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a, stable across platforms (std::hash is not).
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// A reproducible random stream. Replicate r of an experiment with master
/// seed s and purpose tag g always sees the same stream `derive(s, g, r)`,
/// which is what makes results independent of the worker count.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  static RngStream derive(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
    return RngStream(mix64(mix64(master ^ mix64(tag)) + index));
  }
  static RngStream derive(std::uint64_t master, std::string_view tag, std::uint64_t index) {
    return derive(master, fnv1a64(tag), index);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exp(1).
  double exponential() { return -std::log(uniform()); }

 private:
  std::mt19937_64 engine_;
};

/// Seed plus parallelism for replicate-parallel Monte Carlo.
struct MonteCarlo {
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

}  // namespace stablelab
