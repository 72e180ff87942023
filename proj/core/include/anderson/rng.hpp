#pragma once

#include <cstdint>

namespace anderson {

/// splitmix64 finalizer. Bijective 64-bit mix, used for seed derivation.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman/Vigna), state expanded from a 64-bit seed with
/// splitmix64. All disorder realizations are drawn from this generator so
/// that runs reproduce bit-for-bit across platforms.
class Xoshiro256pp {
public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

/// Seed for one (disorder value, realization) cell of a sweep. Independent
/// streams per cell, insensitive to execution order.
constexpr std::uint64_t cell_seed(std::uint64_t master_seed, int c_index,
                                  int realization_index) {
  std::uint64_t h = mix64(master_seed ^ 0xa0761d6478bd642fULL);
  h = mix64(h ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(c_index + 1)));
  h = mix64(h ^ (0xbf58476d1ce4e5b9ULL * static_cast<std::uint64_t>(realization_index + 1)));
  return h;
}

} // namespace anderson
