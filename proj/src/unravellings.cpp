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

#include "noisytb/unravellings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "noisytb/error.hpp"
#include "noisytb/hamiltonian.hpp"

namespace ntb {

std::string_view to_string(Unravelling u) {
  switch (u) {
    case Unravelling::wnp: return "wnp";
    case Unravelling::qsd: return "qsd";
    case Unravelling::qsd_wide_open: return "qsd-wide";
    case Unravelling::jump: return "jump";
    case Unravelling::jump_event_driven: return "jump-event";
  }
  return "?";
}

Unravelling parse_unravelling(std::string_view s) {
  for (auto u : {Unravelling::wnp, Unravelling::qsd, Unravelling::qsd_wide_open,
                 Unravelling::jump, Unravelling::jump_event_driven})
    if (s == to_string(u)) return u;
  throw ConfigError("unknown unravelling '" + std::string(s) +
                    "' (expected wnp|qsd|qsd-wide|jump|jump-event)");
}

std::string_view to_string(QsdNoise n) { return n == QsdNoise::complex ? "complex" : "real"; }

QsdNoise parse_qsd_noise(std::string_view s) {
  if (s == "complex") return QsdNoise::complex;
  if (s == "real") return QsdNoise::real;
  throw ConfigError("unknown noise variant '" + std::string(s) + "' (expected complex|real)");
}

NoiseKind noise_kind_for(const UnravellingKind& k) {
  const bool diffusive = k.tag == Unravelling::qsd || k.tag == Unravelling::qsd_wide_open;
  return diffusive && k.noise == QsdNoise::complex ? NoiseKind::complex_wiener
                                                   : NoiseKind::real_wiener;
}

std::vector<double> JumpLog::waiting_times() const {
  std::vector<double> w;
  w.reserve(events.size());
  double prev = 0.0;
  for (const auto& e : events) {
    w.push_back(e.time - prev);
    prev = e.time;
  }
  return w;
}

namespace {

constexpr double kGrowWeight = 1e-30;
constexpr double kDropWeight = 1e-34;
constexpr std::size_t kMargin = 4;
constexpr std::size_t kBlock = 16;
constexpr std::size_t kEdgeSites = 10;
constexpr double kEdgeWeight = 1e-10;

bool any_above(const WaveFunction& psi, std::size_t lo, std::size_t hi, double thr) {
  for (std::size_t i = lo; i < hi; ++i)
    if (psi.weight(i) > thr) return true;
  return false;
}

}  // namespace

void refresh_window(WaveFunction& psi) {
  if (psi.boundary() == Boundary::periodic) return;
  const std::size_t n = psi.size();
  SiteWindow w = psi.window();
  if (w.size() == 0) return;

  if (w.lo > 0 && any_above(psi, w.lo, std::min(w.lo + kMargin, w.hi), kGrowWeight))
    w.lo = w.lo > kBlock ? w.lo - kBlock : 0;
  if (w.hi < n && any_above(psi, w.hi > kMargin ? std::max(w.hi - kMargin, w.lo) : w.lo, w.hi,
                            kGrowWeight))
    w.hi = std::min(n, w.hi + kBlock);

  while (w.size() > 2 * kBlock + 2 * kMargin &&
         !any_above(psi, w.lo, w.lo + kBlock + kMargin, kDropWeight)) {
    for (std::size_t i = w.lo; i < w.lo + kBlock; ++i) psi.re()[i] = psi.im()[i] = 0.0;
    w.lo += kBlock;
  }
  while (w.size() > 2 * kBlock + 2 * kMargin &&
         !any_above(psi, w.hi - kBlock - kMargin, w.hi, kDropWeight)) {
    for (std::size_t i = w.hi - kBlock; i < w.hi; ++i) psi.re()[i] = psi.im()[i] = 0.0;
    w.hi -= kBlock;
  }
  psi.set_window(w);

  if (w.lo == 0 || w.hi == n) {
    double edge = 0.0;
    for (std::size_t i = 0; i < std::min(kEdgeSites, n); ++i) edge += psi.weight(i);
    for (std::size_t i = n - std::min(kEdgeSites, n); i < n; ++i) edge += psi.weight(i);
    if (edge > kEdgeWeight)
      throw BoundaryError("wave function reached the open lattice edge (edge weight " +
                          std::to_string(edge) + "); use a larger lattice");
  }
}

Stepper::Stepper(const ModelParams& params, const simd::Kernels& kernels)
    : params_(params), k_(&kernels) {
  params_.validate();
  ensure_capacity(params_.n_sites);
}

void Stepper::ensure_capacity(std::size_t n) {
  if (out_re_.size() >= n + 2) return;
  out_re_.assign(n + 2, 0.0);
  out_im_.assign(n + 2, 0.0);
  zr_.assign(n + 2, 0.0);
  zi_.assign(n + 2, 0.0);
}

void Stepper::finish(WaveFunction& psi, double norm_sq, std::uint64_t step) {
  last_drift_ = norm_sq - 1.0;
  if (!(std::abs(last_drift_) <= kMaxNormDrift + kNoiseDriftFactor * params_.gamma * params_.dt))
    throw InstabilityError("norm drifted by " + std::to_string(last_drift_) + " at step " +
                           std::to_string(step) + " (t = " +
                           std::to_string(double(step + 1) * params_.dt) +
                           "); reduce dt");
  const auto& w = psi.window();
  k_->scale(out_re_.data() + w.lo, out_im_.data() + w.lo, psi.re() + w.lo, psi.im() + w.lo,
            w.size(), 1.0 / std::sqrt(norm_sq));
}

void Stepper::wnp_step(WaveFunction& psi, NoiseStream& stream) {
  ensure_capacity(psi.size());
  const std::uint64_t step = stream.next_step();
  refresh_window(psi);
  psi.fill_ghosts();
  const auto& w = psi.window();
  stream.normals(step, NoiseChannel::real_part, w.lo, w.size(), zr_.data() + w.lo);
  const simd::WnpCoeffs c{params_.dt, 1.0 - 0.5 * params_.gamma * params_.dt,
                          std::sqrt(params_.gamma * params_.dt)};
  const double norm = k_->wnp_euler(c, psi.re() + w.lo, psi.im() + w.lo, zr_.data() + w.lo,
                                    out_re_.data() + w.lo, out_im_.data() + w.lo, w.size());
  finish(psi, norm, step);
}

template <bool kKinetic>
void Stepper::qsd_impl(WaveFunction& psi, NoiseStream& stream, QsdNoise noise) {
  ensure_capacity(psi.size());
  const std::uint64_t step = stream.next_step();
  refresh_window(psi);
  if constexpr (kKinetic) psi.fill_ghosts();
  const auto& w = psi.window();
  double* zr = zr_.data() + w.lo;
  double* zi = zi_.data() + w.lo;
  stream.normals(step, NoiseChannel::real_part, w.lo, w.size(), zr);
  double sigma = 0.0;
  if (noise == QsdNoise::complex) {
    stream.normals(step, NoiseChannel::imag_part, w.lo, w.size(), zi);
    sigma = std::sqrt(0.5 * params_.dt);
  } else {
    std::fill(zi, zi + w.size(), 0.0);
    sigma = std::sqrt(params_.dt);
  }
  const simd::QsdMoments m = k_->qsd_moments(psi.re() + w.lo, psi.im() + w.lo, zr, zi, w.size());
  const simd::QsdCoeffs c{params_.dt,
                          params_.gamma * params_.dt,
                          std::sqrt(params_.gamma) * sigma,
                          m.sum_p2,
                          m.sum_pzr,
                          m.sum_pzi};
  const auto kernel = kKinetic ? k_->qsd_euler : k_->qsd_euler_wide_open;
  const double norm = kernel(c, psi.re() + w.lo, psi.im() + w.lo, zr, zi,
                             out_re_.data() + w.lo, out_im_.data() + w.lo, w.size());
  finish(psi, norm, step);
}

void Stepper::qsd_step(WaveFunction& psi, NoiseStream& stream, QsdNoise noise) {
  qsd_impl<true>(psi, stream, noise);
}

void Stepper::qsd_wide_open_step(WaveFunction& psi, NoiseStream& stream, QsdNoise noise) {
  qsd_impl<false>(psi, stream, noise);
}

void Stepper::jump_step(WaveFunction& psi, NoiseStream& stream, JumpLog* log) {
  const double p_jump = params_.gamma * params_.dt;
  if (p_jump > kMaxJumpProbability)
    throw ConfigError("time-stepped jump unravelling needs gamma dt <= 0.01 (got " +
                      std::to_string(p_jump) + ")");
  ensure_capacity(psi.size());
  const std::uint64_t step = stream.next_step();
  if (stream.uniform(NoiseChannel::jump_decide, step) < p_jump) {
    const std::size_t site = sample_site(psi, stream.uniform(NoiseChannel::jump_site, step));
    psi.collapse_to(site);
    last_drift_ = 0.0;
    if (log != nullptr)
      log->events.push_back({double(step + 1) * params_.dt, psi.coordinate(site)});
    return;
  }
  refresh_window(psi);
  psi.fill_ghosts();
  const auto& w = psi.window();
  const double norm = k_->free_euler(params_.dt, psi.re() + w.lo, psi.im() + w.lo,
                                     out_re_.data() + w.lo, out_im_.data() + w.lo, w.size());
  finish(psi, norm, step);
}

void Stepper::step(WaveFunction& psi, NoiseStream& stream, const UnravellingKind& kind,
                   JumpLog* log) {
  switch (kind.tag) {
    case Unravelling::wnp: wnp_step(psi, stream); return;
    case Unravelling::qsd: qsd_step(psi, stream, kind.noise); return;
    case Unravelling::qsd_wide_open: qsd_wide_open_step(psi, stream, kind.noise); return;
    case Unravelling::jump: jump_step(psi, stream, log); return;
    case Unravelling::jump_event_driven:
      throw ConfigError("the event-driven jump unravelling is not time-stepped");
  }
}

std::size_t sample_site(const WaveFunction& psi, double u) {
  const auto& w = psi.window();
  double total = 0.0;
  for (std::size_t i = w.lo; i < w.hi; ++i) total += psi.weight(i);
  const double target = u * total;
  double cum = 0.0;
  std::size_t last_nonzero = w.lo;
  for (std::size_t i = w.lo; i < w.hi; ++i) {
    const double p = psi.weight(i);
    if (p > 0.0) last_nonzero = i;
    cum += p;
    if (cum > target) return i;
  }
  return last_nonzero;
}

std::size_t jump_collapse(const WaveFunction& anchor, double tau, double u) {
  if (tau == 0.0) return sample_site(anchor, u);
  return sample_site(free_evolve(anchor, tau), u);
}

JumpLog jump_event_driven(const WaveFunction& psi, const ModelParams& params,
                          const NoiseStream& stream, std::span<const double> grid,
                          const GridObserver& observe) {
  params.validate();
  JumpLog log;
  WaveFunction anchor = psi;
  double anchor_t = 0.0;
  std::size_t gi = 0;
  const double t_end = grid.empty() ? params.t_max : std::max(params.t_max, grid.back());
  for (std::uint64_t k = 0;; ++k) {
    const double tau = params.gamma > 0.0
                           ? -std::log(stream.uniform_open(NoiseChannel::jump_wait, k)) /
                                 params.gamma
                           : std::numeric_limits<double>::infinity();
    const double t_next = anchor_t + tau;
    while (gi < grid.size() && grid[gi] < t_next) {
      observe(gi, free_evolve(anchor, grid[gi] - anchor_t));
      ++gi;
    }
    if (t_next > t_end) break;
    const std::size_t site =
        jump_collapse(anchor, tau, stream.uniform(NoiseChannel::jump_site, k));
    anchor.clear();
    anchor.collapse_to(site);
    anchor_t = t_next;
    log.events.push_back({t_next, anchor.coordinate(site)});
  }
  return log;
}

TrajectoryRecord jump_event_driven(const WaveFunction& psi, const ModelParams& params,
                                   const NoiseStream& stream, std::span<const double> grid,
                                   JumpLog* log) {
  TrajectoryRecord rec;
  rec.grid.assign(grid.begin(), grid.end());
  rec.resize(grid.size());
  JumpLog l = jump_event_driven(psi, params, stream, grid,
                                [&](std::size_t i, const WaveFunction& s) { rec.store(i, measure(s)); });
  if (log != nullptr) *log = std::move(l);
  return rec;
}

}  // namespace ntb
