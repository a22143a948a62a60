#pragma once

#include <array>
#include <cstdint>

namespace toomlab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11): a keyed
/// bijection of a 128-bit counter, so any draw can be computed independently
/// of every other.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr int kRounds = 10;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < kRounds; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

/// Seed of a noisy trajectory. The uniform for site x at step t is lane x % 4
/// of Philox(counter = (x / 4, t), key = seed), a pure function of (seed, t, x).
struct RngKey {
  std::uint64_t seed = 0;

  Philox4x32::Key key() const noexcept {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }
  Philox4x32::Counter block_counter(std::uint64_t block, std::uint64_t t) const noexcept {
    return {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
            static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
  }
  std::uint32_t site_uniform(std::uint64_t t, std::uint64_t site) const noexcept {
    return Philox4x32::generate(block_counter(site / 4, t), key())[site % 4];
  }
};

/// SplitMix64 finalizer; used to derive independent replica seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr RngKey replica_key(std::uint64_t seed, std::uint64_t replica) noexcept {
  return RngKey{mix64(seed ^ mix64(replica + 0x5851F42D4C957F2Dull))};
}

}  // namespace toomlab
