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
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "noisytb/kernels.hpp"
#include "noisytb/lattice.hpp"
#include "noisytb/noise.hpp"
#include "noisytb/observables.hpp"

namespace ntb {

enum class Unravelling { wnp, qsd, qsd_wide_open, jump, jump_event_driven };
enum class QsdNoise { complex, real };

struct UnravellingKind {
  Unravelling tag = Unravelling::wnp;
  /// Only read by the diffusion unravellings.
  QsdNoise noise = QsdNoise::complex;
};

/// CLI spelling: wnp | qsd | qsd-wide | jump | jump-event.
std::string_view to_string(Unravelling u);
Unravelling parse_unravelling(std::string_view s);
std::string_view to_string(QsdNoise n);
QsdNoise parse_qsd_noise(std::string_view s);
NoiseKind noise_kind_for(const UnravellingKind& k);

struct JumpEvent {
  double time = 0.0;
  /// Lattice coordinate the state collapsed onto.
  std::int64_t site = 0;
};

struct JumpLog {
  std::vector<JumpEvent> events;

  /// Intervals between consecutive jumps, the first measured from t = 0.
  std::vector<double> waiting_times() const;
};

/// Largest tolerated |norm - 1| before renormalization is
/// kMaxNormDrift + kNoiseDriftFactor * gamma * dt.
inline constexpr double kMaxNormDrift = 1e-2;
inline constexpr double kNoiseDriftFactor = 20.0;
/// Largest tolerated gamma dt in the time-stepped jump unravelling.
inline constexpr double kMaxJumpProbability = 1e-2;

/// Per-trajectory stepping engine for the time-stepped unravellings.
///
/// Owns scratch buffers and the active kernel table; holds no trajectory
/// state. On open chains each step maintains the active window of psi: it
/// grows ahead of the spreading amplitude and drops edge blocks whose weight
/// fell below 1e-34. A BoundaryError is raised once more than 1e-10 of the
/// weight sits within 10 sites of an open edge.
class Stepper {
 public:
  explicit Stepper(const ModelParams& params,
                   const simd::Kernels& kernels = simd::active_kernels());

  /// dc = i lap(c) dt - i sqrt(gamma) c dW - gamma/2 c dt, then renormalize.
  void wnp_step(WaveFunction& psi, NoiseStream& stream);
  /// Nonlinear quantum-state-diffusion step, then renormalize.
  void qsd_step(WaveFunction& psi, NoiseStream& stream, QsdNoise noise);
  /// qsd_step without the kinetic term.
  void qsd_wide_open_step(WaveFunction& psi, NoiseStream& stream, QsdNoise noise);
  /// With probability gamma dt collapse onto a site drawn from |c_n|^2,
  /// otherwise one normalized free Euler step.
  void jump_step(WaveFunction& psi, NoiseStream& stream, JumpLog* log = nullptr);

  /// Dispatches on the unravelling tag (not valid for jump_event_driven).
  void step(WaveFunction& psi, NoiseStream& stream, const UnravellingKind& kind,
            JumpLog* log = nullptr);

  /// Norm of the state before the last renormalization, minus one.
  double last_norm_drift() const { return last_drift_; }

  const ModelParams& params() const { return params_; }

 private:
  template <bool kKinetic>
  void qsd_impl(WaveFunction& psi, NoiseStream& stream, QsdNoise noise);
  void finish(WaveFunction& psi, double norm_sq, std::uint64_t step);
  void ensure_capacity(std::size_t n);

  ModelParams params_;
  const simd::Kernels* k_;
  std::vector<double> out_re_, out_im_, zr_, zi_;
  double last_drift_ = 0.0;
};

/// Maintains the active window of psi after an update (open chains).
void refresh_window(WaveFunction& psi);

/// Index of the site selected by inverse-CDF sampling over |c_n|^2 with a
/// single uniform u in [0, 1).
std::size_t sample_site(const WaveFunction& psi, double u);

/// State just before the next jump of the event-driven process: the anchor
/// evolved freely by tau. Returns the site it collapses onto for uniform u.
std::size_t jump_collapse(const WaveFunction& anchor, double tau, double u);

/// Callback receiving (grid index, state at that grid time).
using GridObserver = std::function<void(std::size_t, const WaveFunction&)>;

/// Event-driven jump unravelling: exponential waiting times of mean 1/gamma,
/// exact free evolution between jumps, collapse onto a site drawn from
/// |c_n|^2. Observes the state at every grid time up to t_max.
JumpLog jump_event_driven(const WaveFunction& psi, const ModelParams& params,
                          const NoiseStream& stream, std::span<const double> grid,
                          const GridObserver& observe);

/// Convenience form that measures observables on the grid.
TrajectoryRecord jump_event_driven(const WaveFunction& psi, const ModelParams& params,
                                   const NoiseStream& stream, std::span<const double> grid,
                                   JumpLog* log = nullptr);

}  // namespace ntb
