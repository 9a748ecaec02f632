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

#include <cmath>
#include <numbers>

#include "noisytb/kernels.hpp"

namespace ntb::simd {
namespace {

void gaussian_pairs(PhiloxKey key, std::uint64_t step, std::uint32_t tag,
                    std::uint64_t first_pair, std::size_t n_pairs, double* out) {
  const auto step_lo = static_cast<std::uint32_t>(step);
  const auto step_hi = static_cast<std::uint32_t>(step >> 32);
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const auto j = static_cast<std::uint32_t>(first_pair + p);
    const PhiloxCounter x = philox::generate({j, step_lo, step_hi, tag}, key);
    const double u1 = 1.0 - philox::unit_from_bits(x[0], x[1]);
    const double u2 = philox::unit_from_bits(x[2], x[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    out[2 * p] = r * std::cos(theta);
    out[2 * p + 1] = r * std::sin(theta);
  }
}

double free_euler(double dt, const double* re, const double* im, double* out_re,
                  double* out_im, std::size_t n) {
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lap_re = re[i + 1] + re[i - 1] - 2.0 * re[i];
    const double lap_im = im[i + 1] + im[i - 1] - 2.0 * im[i];
    const double a = re[i] - lap_im * dt;
    const double b = im[i] + lap_re * dt;
    out_re[i] = a;
    out_im[i] = b;
    norm += a * a + b * b;
  }
  return norm;
}

// dc = i lap(c) dt - i sqrt(gamma) c dW - gamma/2 c dt
double wnp_euler(const WnpCoeffs& k, const double* re, const double* im, const double* z,
                 double* out_re, double* out_im, std::size_t n) {
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lap_re = re[i + 1] + re[i - 1] - 2.0 * re[i];
    const double lap_im = im[i + 1] + im[i - 1] - 2.0 * im[i];
    const double a = k.noise_scale * z[i];
    const double nr = k.damping * re[i] - lap_im * k.dt + a * im[i];
    const double ni = k.damping * im[i] + lap_re * k.dt - a * re[i];
    out_re[i] = nr;
    out_im[i] = ni;
    norm += nr * nr + ni * ni;
  }
  return norm;
}

QsdMoments qsd_moments(const double* re, const double* im, const double* zr,
                       const double* zi, std::size_t n) {
  QsdMoments m;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = re[i] * re[i] + im[i] * im[i];
    m.sum_p += p;
    m.sum_p2 += p * p;
    m.sum_pzr += p * zr[i];
    m.sum_pzi += p * zi[i];
  }
  return m;
}

// dc = i lap(c) dt + gamma (p - 1/2 - S4/2) c dt + sqrt(gamma) (dxi - sum p dxi) c
template <bool kKinetic>
double qsd_euler_impl(const QsdCoeffs& k, const double* re, const double* im,
                      const double* zr, const double* zi, double* out_re, double* out_im,
                      std::size_t n) {
  const double base = 1.0 - 0.5 * k.gamma_dt * (1.0 + k.sum_p2);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cr = re[i];
    const double ci = im[i];
    const double p = cr * cr + ci * ci;
    const double f = base + k.gamma_dt * p;
    const double br = k.noise_scale * (zr[i] - k.mean_zr);
    const double bi = k.noise_scale * (zi[i] - k.mean_zi);
    double nr = (f + br) * cr - bi * ci;
    double ni = (f + br) * ci + bi * cr;
    if constexpr (kKinetic) {
      const double lap_re = re[i + 1] + re[i - 1] - 2.0 * cr;
      const double lap_im = im[i + 1] + im[i - 1] - 2.0 * ci;
      nr -= lap_im * k.dt;
      ni += lap_re * k.dt;
    }
    out_re[i] = nr;
    out_im[i] = ni;
    norm += nr * nr + ni * ni;
  }
  return norm;
}

void scale(const double* src_re, const double* src_im, double* dst_re, double* dst_im,
           std::size_t n, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    dst_re[i] = s * src_re[i];
    dst_im[i] = s * src_im[i];
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels table{
      "scalar",          &gaussian_pairs,
      &free_euler,       &wnp_euler,
      &qsd_moments,      &qsd_euler_impl<true>,
      &qsd_euler_impl<false>, &scale,
  };
  return table;
}

}  // namespace ntb::simd
