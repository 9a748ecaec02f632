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

#include <cstdint>
#include <vector>

#include "noisytb/lattice.hpp"

namespace ntb {

/// Validated accuracy window of the Bessel routines.
inline constexpr int kMaxBesselOrder = 200;
inline constexpr double kMaxPropagatorTime = 50.0;

/// J_0(x) ... J_{n_max}(x) by Miller's backward recurrence, normalized with
/// J_0 + 2 sum_k J_{2k} = 1. Absolute accuracy ~1e-13 for n_max <= 200 and
/// 0 <= x <= 100.
std::vector<double> bessel_j_sequence(int n_max, double x);

/// Free-lattice propagator column g_n(t) = e^{2it} <n| exp(-iHt) |0> = i^n J_n(2t)
/// for displacements |n| <= reach. The factor e^{2it} removes the global phase
/// from the constant diagonal of H = -Laplacian.
struct PropagatorColumn {
  double t = 0.0;
  int reach = 0;
  /// g[n + reach] for n in [-reach, reach].
  std::vector<cplx> g;

  cplx at(int n) const {
    return (n < -reach || n > reach) ? cplx{} : g[static_cast<std::size_t>(n + reach)];
  }
};

/// i (c_{n+1} + c_{n-1} - 2 c_n); neighbours beyond an open edge are zero,
/// periodic chains wrap.
std::vector<cplx> apply_kinetic(const WaveFunction& psi);

/// i^n J_n(2t). Throws RangeError outside |n| <= 200, 0 <= t <= 50.
cplx free_propagator(int n, double t);

/// Column truncated where |J_n(2t)| falls below 1e-18 past the light cone.
PropagatorColumn propagator_column(double t);

/// e^{2it} exp(-iHt) psi by convolution with the analytic propagator.
///
/// On an open chain the packet must stay at least 10 sites clear of both
/// edges for the whole interval (ballistic light cone 2t); otherwise a
/// BoundaryError is thrown. Periodic chains sum over images.
WaveFunction free_evolve(const WaveFunction& psi, double t);

}  // namespace ntb
