#pragma once

#include <cstdint>
#include <random>

namespace tailrisk {

/// splitmix64 finalizer; spreads consecutive stream ids into
/// statistically independent seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic uniform generator.
///
/// Wraps std::mt19937_64 but maps to doubles explicitly (top 53 bits)
/// instead of going through std::uniform_real_distribution, whose
/// output is implementation defined. Identical seeds therefore give
/// identical streams on every platform and standard library.
class rng {
 public:
  explicit rng(std::uint64_t seed) : gen_(seed) {}

  /// Independent generator for stream `stream` under a master seed.
  /// Used to give each bootstrap resample its own stream so results
  /// do not depend on evaluation order or thread count.
  static rng substream(std::uint64_t seed, std::uint64_t stream) {
    return rng(mix64(seed + 0x632be59bd9b4e019ull * (stream + 1)));
  }

  /// Uniform in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1); rejects exact zeros so logs and inverse CDFs
  /// stay finite.
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tailrisk
