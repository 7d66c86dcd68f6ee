#ifndef CGN_RNG_HPP
#define CGN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace cgn {

// Counter-based generator: every output is a hash of (key, counter), and
// child streams are derived by hashing a stream id into the key. Streams
// split from different ids are independent; splitting never perturbs the
// parent. That gives reproducible per-(repetition, fold) randomness no
// matter in which order the work items run.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed ^ kKeyTweak)) {}

  // Child stream for a given id; deterministic, does not advance *this.
  SplitRng split(std::uint64_t stream) const {
    return SplitRng(mix(key_ + 0x9e3779b97f4a7c15ULL * (stream + 1)), 0);
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // Standard normal via Box-Muller; consumes two uniforms per call.
  double next_gaussian() {
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Fisher-Yates over [first, last).
  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const std::uint64_t j = next_below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  SplitRng(std::uint64_t key, int) : key_(key) {}

  // SplitMix64 finalizer (Stafford variant 13).
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  static constexpr std::uint64_t kKeyTweak = 0x5851f42d4c957f2dULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace cgn

#endif  // CGN_RNG_HPP
