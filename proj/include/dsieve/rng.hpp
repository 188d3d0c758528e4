#pragma once

#include <cstdint>

namespace dsieve {

/// xorshift64* (Vigna 2016): state ^= state >> 12; state ^= state << 25;
/// state ^= state >> 27; output = state * 0x2545F4914F6CDD1D.
///
/// Seeds are first scrambled with splitmix64 so that 0 and small integers
/// give well-mixed non-zero states. Per-trial streams are derived with
/// `Xorshift64Star::stream(seed, index)`, which keeps parallel trials
/// reproducible independently of scheduling.
class Xorshift64Star {
 public:
  static constexpr std::uint64_t kMultiplier = 0x2545F4914F6CDD1DULL;
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit Xorshift64Star(std::uint64_t seed) : state_(splitmix64(seed)) {
    if (state_ == 0) state_ = kGolden;
  }

  static Xorshift64Star stream(std::uint64_t seed, std::uint64_t index) {
    return Xorshift64Star(splitmix64(seed) ^ splitmix64(index + kGolden));
  }

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * kMultiplier;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in [0, n); n > 0. Rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return r % n;
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace dsieve
