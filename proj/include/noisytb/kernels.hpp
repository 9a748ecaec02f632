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

#include <cstddef>
#include <cstdint>

#include "noisytb/philox.hpp"

// Data-parallel inner loops of the trajectory steppers.
//
// Every kernel exists as a scalar reference implementation and, when the
// build and the CPU allow it, an AVX2/FMA variant. Both are reached through
// the same function table; active_kernels() picks one at runtime. Amplitude
// pointers address the first site of a window of `n` sites, and the kernels
// read one site before and one site after it (ghost or zero cells).
namespace ntb::simd {

struct WnpCoeffs {
  double dt;
  /// 1 - gamma dt / 2
  double damping;
  /// sqrt(gamma dt); multiplies standard normals.
  double noise_scale;
};

struct QsdCoeffs {
  double dt;
  double gamma_dt;
  /// sqrt(gamma) times the per-component standard deviation of the increment.
  double noise_scale;
  /// sum_m |c_m|^4
  double sum_p2;
  /// sum_m |c_m|^2 z_m for the real and imaginary noise components.
  double mean_zr;
  double mean_zi;
};

struct QsdMoments {
  double sum_p = 0.0;
  double sum_p2 = 0.0;
  double sum_pzr = 0.0;
  double sum_pzi = 0.0;
};

struct Kernels {
  const char* name;

  /// Standard normals for sites [2 first_pair, 2 (first_pair + n_pairs)).
  /// Pair j is the Box-Muller image of Philox4x32-10 at counter
  /// {j, step_lo, step_hi, tag}.
  void (*gaussian_pairs)(PhiloxKey key, std::uint64_t step, std::uint32_t tag,
                         std::uint64_t first_pair, std::size_t n_pairs, double* out);

  /// c' = c + i (c_{+1} + c_{-1} - 2c) dt. Returns sum |c'|^2.
  double (*free_euler)(double dt, const double* re, const double* im, double* out_re,
                       double* out_im, std::size_t n);

  /// White-noise-potential Euler-Maruyama update. Returns sum |c'|^2.
  double (*wnp_euler)(const WnpCoeffs& k, const double* re, const double* im,
                      const double* z, double* out_re, double* out_im, std::size_t n);

  QsdMoments (*qsd_moments)(const double* re, const double* im, const double* zr,
                            const double* zi, std::size_t n);

  /// Quantum-state-diffusion Euler-Maruyama update. Returns sum |c'|^2.
  double (*qsd_euler)(const QsdCoeffs& k, const double* re, const double* im,
                      const double* zr, const double* zi, double* out_re,
                      double* out_im, std::size_t n);

  /// Same update with the kinetic term removed (wide-open system).
  double (*qsd_euler_wide_open)(const QsdCoeffs& k, const double* re, const double* im,
                                const double* zr, const double* zi, double* out_re,
                                double* out_im, std::size_t n);

  /// dst = s * src; dst may alias src.
  void (*scale)(const double* src_re, const double* src_im, double* dst_re,
                double* dst_im, std::size_t n, double s);
};

const Kernels& scalar_kernels();

/// AVX2/FMA table, or nullptr when not compiled in or unsupported by the CPU.
const Kernels* avx2_kernels();

/// Fastest available table. NTB_SIMD=scalar in the environment forces the
/// scalar reference.
const Kernels& active_kernels();

}  // namespace ntb::simd
