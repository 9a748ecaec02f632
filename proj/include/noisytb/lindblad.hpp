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
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "noisytb/lattice.hpp"

namespace ntb {

inline constexpr double kDefaultLindbladDt = 1e-3;
/// Largest lattice on which dense integration is offered.
inline constexpr std::size_t kMaxLindbladSites = 256;
/// Largest lattice on which positivity is checked by diagonalization.
inline constexpr std::size_t kMaxPositivitySites = 64;

struct LindbladState {
  DensityMatrix rho;
  double t = 0.0;
};

/// Size of the invariant-restoring corrections applied by one step.
struct StepCorrections {
  double hermiticity = 0.0;
  double trace = 0.0;
};

/// Dense master-equation integrator for
///   d rho / dt = -i [H, rho] + gamma (diag[rho] - rho),   H = -Laplacian.
class LindbladSolver {
 public:
  /// Uses gamma, n_sites and boundary of `params`.
  explicit LindbladSolver(const ModelParams& params, double dt = kDefaultLindbladDt);

  /// Right-hand side of the master equation.
  Eigen::MatrixXcd rhs(const Eigen::MatrixXcd& rho) const;

  /// One classical RK4 step, then rho <- (rho + rho^dagger) / 2 and
  /// trace renormalization. Throws IntegrationError if either correction
  /// exceeds 1e-9 or a diagonal entry drops below -1e-10.
  StepCorrections step(LindbladState& s) const;

  /// Advances to time t_end (rounded to whole steps). `observe` is called at
  /// the start and after every `every` steps.
  void evolve(LindbladState& s, double t_end,
              const std::function<void(const LindbladState&)>& observe = {},
              std::size_t every = 1) const;

  double dt() const { return dt_; }
  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
  double dt_;
};

LindbladState lindblad_initial(const ModelParams& params, const InitialState& spec);

/// Throws IntegrationError when the smallest eigenvalue is below -1e-8.
/// No-op above kMaxPositivitySites.
void check_positivity(const DensityMatrix& rho);

/// k -> max_n |rho_{n+k,n}| / max_n rho_{n,n} for k = 0 .. k_max. Periodic
/// chains wrap the index.
std::vector<double> offdiagonal_profile(const DensityMatrix& rho, std::size_t k_max,
                                        Boundary boundary);

/// First off-diagonal predicted from the weights once off-diagonals have
/// relaxed: rho_{n+1,n} ~ (i / gamma)(p_n - p_{n+1}). One entry per bond
/// (N - 1 open, N periodic).
std::vector<cplx> adiabatic_offdiagonals(std::span<const double> p, double gamma,
                                         Boundary boundary);

/// rho_{n+1,n} read from a density matrix, in the bond order used above.
std::vector<cplx> first_offdiagonal(const DensityMatrix& rho, Boundary boundary);

/// sqrt(sum_n |rho_{n+1,n}|^2) over the bonds above.
double first_offdiagonal_norm(const DensityMatrix& rho, Boundary boundary);

/// One explicit Euler step of dp_n/dt = (2 / gamma)(p_{n+1} + p_{n-1} - 2 p_n).
/// Open edges are reflecting. Throws InstabilityError if dt 4 / gamma > 0.5.
std::vector<double> reduced_diffusion_step(std::span<const double> p, double gamma, double dt,
                                           Boundary boundary);

/// Repeated reduced_diffusion_step up to time t (whole steps).
std::vector<double> reduced_diffusion_evolve(std::vector<double> p, double gamma, double t,
                                             double dt, Boundary boundary);

/// Uniform state plus a translation-invariant traceless perturbation
/// `amplitude / N` on the k-th upper and lower off-diagonals (periodic).
DensityMatrix translation_invariant_mode(std::size_t n, std::size_t k, double amplitude);

struct DecaySeries {
  std::vector<double> t;
  std::vector<double> values;
};

/// Norm of the first off-diagonal of translation_invariant_mode(N, 1, 0.5)
/// sampled at `samples` + 1 equally spaced times in [0, t_end].
DecaySeries coherence_decay_series(double gamma, std::size_t n_sites, double t_end,
                                   std::size_t samples, double dt = kDefaultLindbladDt);

/// Ensemble-level observables of a density matrix.
struct LindbladObservation {
  double t = 0.0;
  double trace = 0.0;
  double mean_x = 0.0;
  double mean_x2 = 0.0;
  double purity = 0.0;
  double coherence = 0.0;
};

/// Coordinates are array index minus default_origin(N).
LindbladObservation observe_lindblad(const LindbladState& s, Boundary boundary);

}  // namespace ntb
