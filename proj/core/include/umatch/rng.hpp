#pragma once

#include <cstdint>

namespace umatch {

__extension__ using uint128 = unsigned __int128;

/// Seed value carried through configs and manifests.
struct RngSeed {
  std::uint64_t value = 0;
};

/// splitmix64 stream. Used to expand a single 64-bit seed into generator
/// state and to derive per-repetition / per-stage sub-seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** seeded from four consecutive splitmix64 outputs.
///
/// Derived draws are fixed so that other implementations can reproduce
/// generated graphs bit for bit:
///   uniform01()   = (next() >> 11) * 2^-53
///   bounded(n)    = Lemire multiply-shift with rejection on the low word
///   bernoulli(p)  = uniform01() < p   (always consumes one draw)
class Rng {
 public:
  explicit Rng(RngSeed seed) {
    SplitMix64 sm(seed.value);
    for (auto& word : s_) word = sm.next();
  }

  /// Raw state, for checking against reference vectors.
  static Rng from_state(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3) {
    Rng r(RngSeed{0});
    r.s_[0] = s0;
    r.s_[1] = s1;
    r.s_[2] = s2;
    r.s_[3] = s3;
    return r;
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t bounded(std::uint64_t bound) {
    uint128 m = static_cast<uint128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<uint128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

}  // namespace umatch
