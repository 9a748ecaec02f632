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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "noisytb/philox.hpp"

namespace ntb {

enum class NoiseKind { real_wiener, complex_wiener };

/// Independent sub-streams of one trajectory's noise. Every draw is a pure
/// function of (trajectory seed, channel, index), so the value a lattice site
/// receives does not depend on which other sites were drawn.
enum class NoiseChannel : std::uint32_t {
  real_part = 0,
  imag_part = 1,
  jump_wait = 2,
  jump_site = 3,
  jump_decide = 4,
};

/// Deterministic Wiener-increment source for one trajectory.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, NoiseKind kind)
      : seed_(seed), key_(key_from_seed(seed)), kind_(kind) {}

  static NoiseStream for_trajectory(std::uint64_t base_seed, std::uint64_t trajectory,
                                    NoiseKind kind) {
    return {mix_seed(base_seed, trajectory), kind};
  }

  std::uint64_t seed() const { return seed_; }
  PhiloxKey key() const { return key_; }
  NoiseKind kind() const { return kind_; }

  /// Standard normals for array sites [first, first + count) at time step
  /// `step`. `out` receives `count` values.
  void normals(std::uint64_t step, NoiseChannel channel, std::size_t first,
               std::size_t count, double* out) const;

  /// Uniform in [0, 1).
  double uniform(NoiseChannel channel, std::uint64_t index) const;
  /// Uniform in (0, 1].
  double uniform_open(NoiseChannel channel, std::uint64_t index) const {
    return 1.0 - uniform(channel, index);
  }

  /// Step counter used by the sequential draw_* helpers.
  std::uint64_t next_step() { return step_++; }

 private:
  std::uint64_t seed_;
  PhiloxKey key_;
  NoiseKind kind_;
  std::uint64_t step_ = 0;
};

/// Real Wiener increments dW_n with mean 0 and variance dt, one per site.
std::vector<double> draw_real_increments(NoiseStream& stream, std::size_t n_sites, double dt);

/// Complex increments with Re and Im independent, each of variance dt / 2.
std::vector<std::complex<double>> draw_complex_increments(NoiseStream& stream,
                                                          std::size_t n_sites, double dt);

}  // namespace ntb
