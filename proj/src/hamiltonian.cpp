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

#include "noisytb/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "noisytb/error.hpp"

namespace ntb {

std::vector<double> bessel_j_sequence(int n_max, double x) {
  if (n_max < 0) throw RangeError("negative Bessel order");
  if (!(x >= 0.0) || !std::isfinite(x)) throw RangeError("Bessel argument must be >= 0");
  std::vector<double> j(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }

  // Start far enough above max(n_max, x) that the minimal solution dominates.
  const double top = std::max(double(n_max), x);
  int start = static_cast<int>(top + 40.0 + 2.0 * std::sqrt(40.0 * top));
  start += start % 2;

  constexpr double kBig = 1e250;
  constexpr double kSmall = 1e-250;
  double above = 0.0;  // J_{k+1}
  double cur = 1e-30;  // J_k, arbitrary seed
  double norm = 0.0;   // J_0 + 2 sum J_{2k}, in the running scale
  for (int k = start; k > 0; --k) {
    const double below = (2.0 * k / x) * cur - above;
    above = cur;
    cur = below;
    if (k - 1 <= n_max) j[static_cast<std::size_t>(k - 1)] = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
    if (std::abs(cur) > kBig) {
      cur *= kSmall;
      above *= kSmall;
      norm *= kSmall;
      for (int i = k - 1; i <= n_max; ++i) j[static_cast<std::size_t>(i)] *= kSmall;
    }
  }
  norm += cur;  // J_0
  for (double& v : j) v /= norm;
  return j;
}

namespace {

cplx i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_window(int n, double t) {
  if (std::abs(n) > kMaxBesselOrder || !(t >= 0.0) || t > kMaxPropagatorTime)
    throw RangeError("propagator argument outside validated window (|n| <= " +
                     std::to_string(kMaxBesselOrder) + ", 0 <= t <= " +
                     std::to_string(kMaxPropagatorTime) + "): n=" + std::to_string(n) +
                     " t=" + std::to_string(t));
}

constexpr double kColumnCutoff = 1e-18;

}  // namespace

std::vector<cplx> apply_kinetic(const WaveFunction& psi) {
  const std::size_t n = psi.size();
  const bool periodic = psi.boundary() == Boundary::periodic;
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx left{}, right{};
    if (i > 0) {
      left = psi[i - 1];
    } else if (periodic) {
      left = psi[n - 1];
    }
    if (i + 1 < n) {
      right = psi[i + 1];
    } else if (periodic) {
      right = psi[0];
    }
    out[i] = cplx{0.0, 1.0} * (right + left - 2.0 * psi[i]);
  }
  return out;
}

cplx free_propagator(int n, double t) {
  check_window(n, t);
  const int m = std::abs(n);
  const auto j = bessel_j_sequence(m, 2.0 * t);
  // g_{-n} = g_n since J_{-n} = (-1)^n J_n.
  return i_pow(m) * j[static_cast<std::size_t>(m)];
}

PropagatorColumn propagator_column(double t) {
  check_window(0, t);
  const double x = 2.0 * t;
  const int n_max = std::min(
      kMaxBesselOrder, static_cast<int>(std::ceil(x + 12.0 * std::cbrt(x + 1.0) + 30.0)));
  const auto j = bessel_j_sequence(n_max, x);
  int reach = n_max;
  while (reach > 0 && double(reach) > x && std::abs(j[static_cast<std::size_t>(reach)]) < kColumnCutoff)
    --reach;
  PropagatorColumn col;
  col.t = t;
  col.reach = reach;
  col.g.resize(2 * static_cast<std::size_t>(reach) + 1);
  for (int n = 0; n <= reach; ++n) {
    const cplx v = i_pow(n) * j[static_cast<std::size_t>(n)];
    col.g[static_cast<std::size_t>(reach + n)] = v;
    col.g[static_cast<std::size_t>(reach - n)] = v;
  }
  return col;
}

namespace {

WaveFunction evolve_once(const WaveFunction& psi, double t) {
  const std::size_t n = psi.size();
  const auto& w = psi.window();
  WaveFunction out(n, psi.origin_offset(), psi.boundary());
  if (t == 0.0 || w.size() == 0) return psi;

  const PropagatorColumn col = propagator_column(t);
  const auto reach = static_cast<std::int64_t>(col.reach);
  const auto n_i = static_cast<std::int64_t>(n);

  if (psi.boundary() == Boundary::open) {
    const auto cone = static_cast<std::int64_t>(std::ceil(2.0 * t)) + 10;
    const auto lo = static_cast<std::int64_t>(w.lo);
    const auto hi = static_cast<std::int64_t>(w.hi);
    // Only sites carrying weight count for the light-cone guard.
    std::int64_t first = hi, last = lo - 1;
    for (std::int64_t i = lo; i < hi; ++i) {
      if (psi.weight(static_cast<std::size_t>(i)) > 1e-30) {
        first = std::min(first, i);
        last = std::max(last, i);
      }
    }
    if (first - cone < 0 || last + cone >= n_i)
      throw BoundaryError("free evolution light cone (2t = " + std::to_string(2.0 * t) +
                          ") reaches the open lattice edge");
    const std::int64_t out_lo = std::max<std::int64_t>(0, lo - reach);
    const std::int64_t out_hi = std::min<std::int64_t>(n_i, hi + reach);
    std::vector<cplx> acc(static_cast<std::size_t>(out_hi - out_lo));
    double lost = 0.0;
    for (std::int64_t j = lo; j < hi; ++j) {
      const cplx c = psi[static_cast<std::size_t>(j)];
      if (c == cplx{}) continue;
      for (std::int64_t d = -reach; d <= reach; ++d) {
        const std::int64_t i = j + d;
        const cplx v = col.g[static_cast<std::size_t>(d + reach)] * c;
        if (i < out_lo || i >= out_hi) {
          lost += std::norm(v);
        } else {
          acc[static_cast<std::size_t>(i - out_lo)] += v;
        }
      }
    }
    if (lost > 1e-10)
      throw BoundaryError("free evolution spills weight past the open lattice edge");
    for (std::int64_t i = out_lo; i < out_hi; ++i)
      out.set(static_cast<std::size_t>(i), acc[static_cast<std::size_t>(i - out_lo)]);
    return out;
  }

  std::vector<cplx> acc(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx c = psi[j];
    if (c == cplx{}) continue;
    for (std::int64_t d = -reach; d <= reach; ++d) {
      std::int64_t i = (static_cast<std::int64_t>(j) + d) % n_i;
      if (i < 0) i += n_i;
      acc[static_cast<std::size_t>(i)] += col.g[static_cast<std::size_t>(d + reach)] * c;
    }
  }
  for (std::size_t i = 0; i < n; ++i) out.set(i, acc[i]);
  return out;
}

}  // namespace

WaveFunction free_evolve(const WaveFunction& psi, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw RangeError("free_evolve needs t >= 0");
  WaveFunction cur = psi;
  double left = t;
  while (left > kMaxPropagatorTime) {
    cur = evolve_once(cur, kMaxPropagatorTime);
    left -= kMaxPropagatorTime;
  }
  return evolve_once(cur, left);
}

}  // namespace ntb
