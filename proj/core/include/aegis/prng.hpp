#pragma once

#include <cstdint>

namespace aegis {

/// xorshift64* (Vigna). Fixed so that generated corpora are reproducible
/// across implementations. A zero seed is remapped because the all-zero
/// state is a fixed point of the generator.
class Xorshift64Star {
 public:
  static constexpr std::uint64_t kZeroSeedReplacement = 0x9E3779B97F4A7C15ull;

  explicit Xorshift64Star(std::uint64_t seed) : state_(seed == 0 ? kZeroSeedReplacement : seed) {}

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
  }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    const double span = static_cast<double>(hi) - lo + 1.0;
    return lo + static_cast<int>(uniform() * span);
  }

  /// Irwin-Hall approximation of a standard normal (sum of 12 uniforms - 6).
  double normal() {
    double s = 0.0;
    for (int i = 0; i < 12; ++i) s += uniform();
    return s - 6.0;
  }

 private:
  std::uint64_t state_;
};

/// splitmix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace aegis
