// Copyright 2026 The noisytb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace ntb {

/// Two 32-bit key words of a Philox4x32 stream.
struct PhiloxKey {
  std::uint32_t k0 = 0;
  std::uint32_t k1 = 0;
};

using PhiloxCounter = std::array<std::uint32_t, 4>;

namespace philox {

inline constexpr std::uint32_t kM0 = 0xD2511F53u;
inline constexpr std::uint32_t kM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kW1 = 0xBB67AE85u;
inline constexpr int kRounds = 10;

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
constexpr PhiloxCounter generate(PhiloxCounter x, PhiloxKey key) {
  for (int r = 0; r < kRounds; ++r) {
    const std::uint64_t p0 = std::uint64_t{kM0} * x[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * x[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ key.k0, lo1, hi0 ^ x[3] ^ key.k1, lo0};
    key.k0 += kW0;
    key.k1 += kW1;
  }
  return x;
}

/// Maps 64 random bits to a double in [0, 1) with 52-bit resolution.
///
/// Built by bit manipulation so scalar and vector code paths agree exactly.
inline double unit_from_bits(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
  const std::uint64_t mant = (bits >> 12) | 0x3FF0000000000000ull;
  return std::bit_cast<double>(mant) - 1.0;
}

}  // namespace philox

/// 64-bit finalizer from SplitMix64; a bijection with good avalanche.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Per-trajectory seed derived from the run's base seed and trajectory index.
constexpr std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t trajectory) {
  return splitmix64(base_seed ^ splitmix64(trajectory + 0x632BE59BD9B4E019ull));
}

constexpr PhiloxKey key_from_seed(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

}  // namespace ntb
