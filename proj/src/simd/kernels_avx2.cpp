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

// AVX2/FMA variants of the trajectory kernels. This translation unit is
// compiled with -mavx2 -mfma and only entered after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "noisytb/kernels.hpp"

namespace ntb::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// 32x32 -> 64 multiply of all eight lanes by a broadcast constant.
inline void mulhilo(__m256i a, __m256i m, __m256i& hi, __m256i& lo) {
  const __m256i even = _mm256_mul_epu32(a, m);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), m);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0b10101010);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0b10101010);
}

inline __m256d unit_from_bits(__m256i bits) {
  const __m256i one = _mm256_set1_epi64x(0x3FF0000000000000ll);
  const __m256i mant = _mm256_or_si256(_mm256_srli_epi64(bits, 12), one);
  return _mm256_sub_pd(_mm256_castsi256_pd(mant), _mm256_set1_pd(1.0));
}

// log(u) for u in (0, 1], normal doubles only. Reduces to m in [sqrt(1/2),
// sqrt(2)) and sums the atanh series of s = (m - 1) / (m + 1).
inline __m256d log_unit(__m256d u) {
  const __m256i bits = _mm256_castpd_si256(u);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000ll);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  const __m256i biased = _mm256_srli_epi64(bits, 52);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000ll);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(biased, magic)),
                            _mm256_set1_pd(4503599627370496.0 + 1023.0));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(std::numbers::sqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(1.0 / 25.0);
  for (int k = 11; k >= 1; --k)
    p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / double(2 * k + 1)));
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d lm = _mm256_fmadd_pd(_mm256_mul_pd(two_s, s2), p, two_s);
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  return _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Hi),
                         _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Lo), lm));
}

// sin and cos of 2 pi u for u in [0, 1). The octant is removed in u, where
// the subtraction is exact.
inline void sincos_turn(__m256d u, __m256d& sin_out, __m256d& cos_out) {
  const __m256d j = _mm256_round_pd(_mm256_mul_pd(u, _mm256_set1_pd(4.0)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d x = _mm256_mul_pd(_mm256_fnmadd_pd(j, _mm256_set1_pd(0.25), u),
                                  _mm256_set1_pd(2.0 * std::numbers::pi));
  const __m256d x2 = _mm256_mul_pd(x, x);
  // Taylor coefficients through x^17 and x^18.
  __m256d ps = _mm256_set1_pd(1.0 / 355687428096000.0);
  ps = _mm256_fmadd_pd(ps, x2, _mm256_set1_pd(-1.0 / 1307674368000.0));
  ps = _mm256_fmadd_pd(ps, x2, _mm256_set1_pd(1.0 / 6227020800.0));
  ps = _mm256_fmadd_pd(ps, x2, _mm256_set1_pd(-1.0 / 39916800.0));
  ps = _mm256_fmadd_pd(ps, x2, _mm256_set1_pd(1.0 / 362880.0));
  ps = _mm256_fmadd_pd(ps, x2, _mm256_set1_pd(-1.0 / 5040.0));
  ps = _mm256_fmadd_pd(ps, x2, _mm256_set1_pd(1.0 / 120.0));
  ps = _mm256_fmadd_pd(ps, x2, _mm256_set1_pd(-1.0 / 6.0));
  const __m256d sn = _mm256_fmadd_pd(_mm256_mul_pd(x, x2), ps, x);
  __m256d pc = _mm256_set1_pd(-1.0 / 6402373705728000.0);
  pc = _mm256_fmadd_pd(pc, x2, _mm256_set1_pd(1.0 / 20922789888000.0));
  pc = _mm256_fmadd_pd(pc, x2, _mm256_set1_pd(-1.0 / 87178291200.0));
  pc = _mm256_fmadd_pd(pc, x2, _mm256_set1_pd(1.0 / 479001600.0));
  pc = _mm256_fmadd_pd(pc, x2, _mm256_set1_pd(-1.0 / 3628800.0));
  pc = _mm256_fmadd_pd(pc, x2, _mm256_set1_pd(1.0 / 40320.0));
  pc = _mm256_fmadd_pd(pc, x2, _mm256_set1_pd(-1.0 / 720.0));
  pc = _mm256_fmadd_pd(pc, x2, _mm256_set1_pd(1.0 / 24.0));
  pc = _mm256_fmadd_pd(pc, x2, _mm256_set1_pd(-0.5));
  const __m256d cs = _mm256_fmadd_pd(x2, pc, _mm256_set1_pd(1.0));

  // Quadrant q = j mod 4 rotates (sin, cos) by q quarter turns.
  const __m256d q = _mm256_fnmadd_pd(
      _mm256_floor_pd(_mm256_mul_pd(j, _mm256_set1_pd(0.25))), _mm256_set1_pd(4.0), j);
  const __m256d odd = _mm256_or_pd(_mm256_cmp_pd(q, _mm256_set1_pd(1.0), _CMP_EQ_OQ),
                                   _mm256_cmp_pd(q, _mm256_set1_pd(3.0), _CMP_EQ_OQ));
  const __m256d sin_neg = _mm256_cmp_pd(q, _mm256_set1_pd(1.5), _CMP_GT_OQ);
  const __m256d cos_neg = _mm256_and_pd(_mm256_cmp_pd(q, _mm256_set1_pd(0.5), _CMP_GT_OQ),
                                        _mm256_cmp_pd(q, _mm256_set1_pd(2.5), _CMP_LT_OQ));
  const __m256d sign = _mm256_set1_pd(-0.0);
  sin_out = _mm256_xor_pd(_mm256_blendv_pd(sn, cs, odd), _mm256_and_pd(sin_neg, sign));
  cos_out = _mm256_xor_pd(_mm256_blendv_pd(cs, sn, odd), _mm256_and_pd(cos_neg, sign));
}

inline void box_muller(__m256d u1, __m256d u2, double* out) {
  const __m256d r = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(-2.0), log_unit(u1)));
  __m256d sn, cs;
  sincos_turn(u2, sn, cs);
  const __m256d z0 = _mm256_mul_pd(r, cs);
  const __m256d z1 = _mm256_mul_pd(r, sn);
  const __m256d lo = _mm256_unpacklo_pd(z0, z1);
  const __m256d hi = _mm256_unpackhi_pd(z0, z1);
  _mm256_storeu_pd(out, _mm256_permute2f128_pd(lo, hi, 0x20));
  _mm256_storeu_pd(out + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
}

void gaussian_pairs(PhiloxKey key, std::uint64_t step, std::uint32_t tag,
                    std::uint64_t first_pair, std::size_t n_pairs, double* out) {
  const auto step_lo = static_cast<std::uint32_t>(step);
  const auto step_hi = static_cast<std::uint32_t>(step >> 32);
  const __m256i m0 = _mm256_set1_epi64x(philox::kM0);
  const __m256i m1 = _mm256_set1_epi64x(philox::kM1);

  __m256i round_k0[philox::kRounds];
  __m256i round_k1[philox::kRounds];
  {
    PhiloxKey k = key;
    for (int r = 0; r < philox::kRounds; ++r) {
      round_k0[r] = _mm256_set1_epi32(static_cast<int>(k.k0));
      round_k1[r] = _mm256_set1_epi32(static_cast<int>(k.k1));
      k.k0 += philox::kW0;
      k.k1 += philox::kW1;
    }
  }
  // Lane order chosen so the 32->64 bit unpacks below yield pairs in order.
  const __m256i lane_offset = _mm256_setr_epi32(0, 1, 4, 5, 2, 3, 6, 7);
  const __m256i c1 = _mm256_set1_epi32(static_cast<int>(step_lo));
  const __m256i c2 = _mm256_set1_epi32(static_cast<int>(step_hi));
  const __m256i c3 = _mm256_set1_epi32(static_cast<int>(tag));
  const __m256d one = _mm256_set1_pd(1.0);

  alignas(32) double tail[16];
  for (std::size_t p = 0; p < n_pairs; p += 8) {
    const auto base = static_cast<std::uint32_t>(first_pair + p);
    __m256i x0 = _mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(base)), lane_offset);
    __m256i x1 = c1;
    __m256i x2 = c2;
    __m256i x3 = c3;
    for (int r = 0; r < philox::kRounds; ++r) {
      __m256i hi0, lo0, hi1, lo1;
      mulhilo(x0, m0, hi0, lo0);
      mulhilo(x2, m1, hi1, lo1);
      x0 = _mm256_xor_si256(_mm256_xor_si256(hi1, x1), round_k0[r]);
      x1 = lo1;
      x2 = _mm256_xor_si256(_mm256_xor_si256(hi0, x3), round_k1[r]);
      x3 = lo0;
    }
    const __m256d u1a = _mm256_sub_pd(one, unit_from_bits(_mm256_unpacklo_epi32(x1, x0)));
    const __m256d u1b = _mm256_sub_pd(one, unit_from_bits(_mm256_unpackhi_epi32(x1, x0)));
    const __m256d u2a = unit_from_bits(_mm256_unpacklo_epi32(x3, x2));
    const __m256d u2b = unit_from_bits(_mm256_unpackhi_epi32(x3, x2));
    if (p + 8 <= n_pairs) {
      box_muller(u1a, u2a, out + 2 * p);
      box_muller(u1b, u2b, out + 2 * p + 8);
    } else {
      box_muller(u1a, u2a, tail);
      box_muller(u1b, u2b, tail + 8);
      std::copy(tail, tail + 2 * (n_pairs - p), out + 2 * p);
    }
  }
}

double free_euler(double dt, const double* re, const double* im, double* out_re,
                  double* out_im, std::size_t n) {
  const __m256d vdt = _mm256_set1_pd(dt);
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d cr = _mm256_loadu_pd(re + i);
    const __m256d ci = _mm256_loadu_pd(im + i);
    const __m256d lap_re = _mm256_fnmadd_pd(
        two, cr, _mm256_add_pd(_mm256_loadu_pd(re + i + 1), _mm256_loadu_pd(re + i - 1)));
    const __m256d lap_im = _mm256_fnmadd_pd(
        two, ci, _mm256_add_pd(_mm256_loadu_pd(im + i + 1), _mm256_loadu_pd(im + i - 1)));
    const __m256d a = _mm256_fnmadd_pd(lap_im, vdt, cr);
    const __m256d b = _mm256_fmadd_pd(lap_re, vdt, ci);
    _mm256_storeu_pd(out_re + i, a);
    _mm256_storeu_pd(out_im + i, b);
    acc = _mm256_fmadd_pd(a, a, _mm256_fmadd_pd(b, b, acc));
  }
  double norm = hsum(acc);
  if (i < n) norm += scalar_kernels().free_euler(dt, re + i, im + i, out_re + i, out_im + i, n - i);
  return norm;
}

double wnp_euler(const WnpCoeffs& k, const double* re, const double* im, const double* z,
                 double* out_re, double* out_im, std::size_t n) {
  const __m256d vdt = _mm256_set1_pd(k.dt);
  const __m256d damp = _mm256_set1_pd(k.damping);
  const __m256d ns = _mm256_set1_pd(k.noise_scale);
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d cr = _mm256_loadu_pd(re + i);
    const __m256d ci = _mm256_loadu_pd(im + i);
    const __m256d lap_re = _mm256_fnmadd_pd(
        two, cr, _mm256_add_pd(_mm256_loadu_pd(re + i + 1), _mm256_loadu_pd(re + i - 1)));
    const __m256d lap_im = _mm256_fnmadd_pd(
        two, ci, _mm256_add_pd(_mm256_loadu_pd(im + i + 1), _mm256_loadu_pd(im + i - 1)));
    const __m256d a = _mm256_mul_pd(ns, _mm256_loadu_pd(z + i));
    const __m256d nr =
        _mm256_fmadd_pd(a, ci, _mm256_fnmadd_pd(lap_im, vdt, _mm256_mul_pd(damp, cr)));
    const __m256d ni =
        _mm256_fnmadd_pd(a, cr, _mm256_fmadd_pd(lap_re, vdt, _mm256_mul_pd(damp, ci)));
    _mm256_storeu_pd(out_re + i, nr);
    _mm256_storeu_pd(out_im + i, ni);
    acc = _mm256_fmadd_pd(nr, nr, _mm256_fmadd_pd(ni, ni, acc));
  }
  double norm = hsum(acc);
  if (i < n)
    norm += scalar_kernels().wnp_euler(k, re + i, im + i, z + i, out_re + i, out_im + i, n - i);
  return norm;
}

QsdMoments qsd_moments(const double* re, const double* im, const double* zr,
                       const double* zi, std::size_t n) {
  __m256d sp = _mm256_setzero_pd();
  __m256d sp2 = _mm256_setzero_pd();
  __m256d szr = _mm256_setzero_pd();
  __m256d szi = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d cr = _mm256_loadu_pd(re + i);
    const __m256d ci = _mm256_loadu_pd(im + i);
    const __m256d p = _mm256_fmadd_pd(cr, cr, _mm256_mul_pd(ci, ci));
    sp = _mm256_add_pd(sp, p);
    sp2 = _mm256_fmadd_pd(p, p, sp2);
    szr = _mm256_fmadd_pd(p, _mm256_loadu_pd(zr + i), szr);
    szi = _mm256_fmadd_pd(p, _mm256_loadu_pd(zi + i), szi);
  }
  QsdMoments m{hsum(sp), hsum(sp2), hsum(szr), hsum(szi)};
  if (i < n) {
    const QsdMoments t = scalar_kernels().qsd_moments(re + i, im + i, zr + i, zi + i, n - i);
    m.sum_p += t.sum_p;
    m.sum_p2 += t.sum_p2;
    m.sum_pzr += t.sum_pzr;
    m.sum_pzi += t.sum_pzi;
  }
  return m;
}

template <bool kKinetic>
double qsd_euler_impl(const QsdCoeffs& k, const double* re, const double* im,
                      const double* zr, const double* zi, double* out_re, double* out_im,
                      std::size_t n) {
  const __m256d base = _mm256_set1_pd(1.0 - 0.5 * k.gamma_dt * (1.0 + k.sum_p2));
  const __m256d gdt = _mm256_set1_pd(k.gamma_dt);
  const __m256d ns = _mm256_set1_pd(k.noise_scale);
  const __m256d mzr = _mm256_set1_pd(k.mean_zr);
  const __m256d mzi = _mm256_set1_pd(k.mean_zi);
  const __m256d vdt = _mm256_set1_pd(k.dt);
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d cr = _mm256_loadu_pd(re + i);
    const __m256d ci = _mm256_loadu_pd(im + i);
    const __m256d p = _mm256_fmadd_pd(cr, cr, _mm256_mul_pd(ci, ci));
    const __m256d f = _mm256_fmadd_pd(gdt, p, base);
    const __m256d br = _mm256_mul_pd(ns, _mm256_sub_pd(_mm256_loadu_pd(zr + i), mzr));
    const __m256d bi = _mm256_mul_pd(ns, _mm256_sub_pd(_mm256_loadu_pd(zi + i), mzi));
    const __m256d fb = _mm256_add_pd(f, br);
    __m256d nr = _mm256_fnmadd_pd(bi, ci, _mm256_mul_pd(fb, cr));
    __m256d ni = _mm256_fmadd_pd(bi, cr, _mm256_mul_pd(fb, ci));
    if constexpr (kKinetic) {
      const __m256d lap_re = _mm256_fnmadd_pd(
          two, cr, _mm256_add_pd(_mm256_loadu_pd(re + i + 1), _mm256_loadu_pd(re + i - 1)));
      const __m256d lap_im = _mm256_fnmadd_pd(
          two, ci, _mm256_add_pd(_mm256_loadu_pd(im + i + 1), _mm256_loadu_pd(im + i - 1)));
      nr = _mm256_fnmadd_pd(lap_im, vdt, nr);
      ni = _mm256_fmadd_pd(lap_re, vdt, ni);
    }
    _mm256_storeu_pd(out_re + i, nr);
    _mm256_storeu_pd(out_im + i, ni);
    acc = _mm256_fmadd_pd(nr, nr, _mm256_fmadd_pd(ni, ni, acc));
  }
  double norm = hsum(acc);
  if (i < n) {
    const auto& s = scalar_kernels();
    norm += (kKinetic ? s.qsd_euler : s.qsd_euler_wide_open)(
        k, re + i, im + i, zr + i, zi + i, out_re + i, out_im + i, n - i);
  }
  return norm;
}

void scale(const double* src_re, const double* src_im, double* dst_re, double* dst_im,
           std::size_t n, double s) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst_re + i, _mm256_mul_pd(vs, _mm256_loadu_pd(src_re + i)));
    _mm256_storeu_pd(dst_im + i, _mm256_mul_pd(vs, _mm256_loadu_pd(src_im + i)));
  }
  for (; i < n; ++i) {
    dst_re[i] = s * src_re[i];
    dst_im[i] = s * src_im[i];
  }
}

}  // namespace

const Kernels& avx2_kernels_table() {
  static const Kernels table{
      "avx2",        &gaussian_pairs,
      &free_euler,   &wnp_euler,
      &qsd_moments,  &qsd_euler_impl<true>,
      &qsd_euler_impl<false>, &scale,
  };
  return table;
}

}  // namespace ntb::simd
