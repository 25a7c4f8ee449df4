#pragma once

// Counter-based generator (Philox4x32-10). A draw is a pure function of
// (key, counter): no sequential state, so any edge of any trial can be
// regenerated in isolation.

#include <array>
#include <cstdint>

namespace fpp {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

// Stream of uniforms addressed by (seed, trial, item). Each item yields up to
// two independent 53-bit uniforms in [0,1).
struct CounterRng {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;

  std::array<double, 2> uniforms(std::uint64_t item) const {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(item), static_cast<std::uint32_t>(item >> 32),
                                  static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const auto out = Philox4x32::generate(ctr, key);
    const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    constexpr double kInv53 = 1.0 / 9007199254740992.0;
    return {static_cast<double>(a >> 11) * kInv53, static_cast<double>(b >> 11) * kInv53};
  }

  double uniform(std::uint64_t item) const { return uniforms(item)[0]; }
};

}  // namespace fpp
