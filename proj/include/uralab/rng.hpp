#pragma once

#include <cmath>
#include <cstdint>

#include "uralab/bits.hpp"

namespace uralab {

/// Deterministic pseudo-random stream (xoshiro256** core, splitmix64 seeding).
///
/// Every stochastic component of the workbench draws from one of these,
/// seeded either directly or through substream(), so that a (masterSeed,
/// trialIndex) pair fully determines a trial regardless of how many trials
/// run or in which order.
class Rng {
public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& s : state_) s = splitmix_next(x);
  }

  /// Independent stream for a given index under a master seed. Uses a
  /// counter-based derivation (two finalizer rounds over the index folded
  /// into the master) so neighboring indices yield unrelated streams.
  static Rng substream(uint64_t masterSeed, uint64_t streamIndex) {
    uint64_t folded = mix(streamIndex * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
    return Rng(mix(masterSeed ^ folded));
  }

  /// splitmix64 finalizer; full-avalanche 64-bit mixer.
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  uint64_t next() {
    uint64_t result = rotl(state_[1] * 5, 7) * 9;
    uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform integer in [0, bound); bound must be nonzero. Unbiased
  /// (multiply-shift with rejection of the short range).
  uint64_t below(uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    uint64_t low = static_cast<uint64_t>(m);
    if (low < bound) {
      uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  /// Uniform double in [0,1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0,1]; safe as a log() argument.
  double unit_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  /// Standard normal via Box-Muller (portable across standard libraries,
  /// unlike std::normal_distribution).
  double gaussian() {
    if (haveSpare_) {
      haveSpare_ = false;
      return spare_;
    }
    double u1 = unit_pos();
    double u2 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    haveSpare_ = true;
    return r * std::cos(theta);
  }

  /// Uniform random bit string of the given width.
  Bits bits(unsigned width) {
    Bits b(width);
    std::array<uint64_t, 4> raw{};
    for (unsigned i = 0; i * 64 < width; ++i) raw[i] = next();
    b.set_limbs_masked(raw);
    return b;
  }

private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static uint64_t splitmix_next(uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    return mix(x);
  }

  uint64_t state_[4];
  double spare_ = 0.0;
  bool haveSpare_ = false;
};

}  // namespace uralab
