#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace linksched {

// Stream tags used when deriving child generators from a master seed. Each
// (seed, tag, index...) tuple maps to an independent stream, so sample i can
// be regenerated without replaying samples 0..i-1.
namespace stream {
inline constexpr std::uint64_t kTrainSplit = 0x7452414e53504c54ULL;
inline constexpr std::uint64_t kTestSplit = 0x5453545053504c54ULL;
inline constexpr std::uint64_t kDeploy = 0x4445504c4f59ULL;
inline constexpr std::uint64_t kChannel = 0x4348414e4e454cULL;
inline constexpr std::uint64_t kModelInit = 0x494e4954ULL;
inline constexpr std::uint64_t kShuffle = 0x53485546464c45ULL;
inline constexpr std::uint64_t kAugment = 0x4155474d454e54ULL;
inline constexpr std::uint64_t kBench = 0x42454e4348ULL;
inline constexpr std::uint64_t kSubsetOrder = 0x535542534554ULL;
}  // namespace stream

/// Counter-based pseudo-random generator. The output sequence is a pure
/// function of (key, counter); `derive` hashes extra words into a fresh key,
/// giving cheap independent streams for parallel sample generation.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  /// New generator whose stream is keyed by (seed, words...).
  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> words) {
    std::uint64_t k = mix(seed + kGamma);
    for (std::uint64_t w : words) {
      k = mix(k ^ mix(w + kGamma));
    }
    return Rng(k);
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64.
    return next_u64() % n;
  }

  /// Standard normal via Box-Muller; pairs are cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] keeps the log finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace linksched
