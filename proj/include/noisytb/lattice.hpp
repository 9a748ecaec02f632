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
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ntb {

using cplx = std::complex<double>;

enum class Boundary { open, periodic };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view s);

/// Dimensionless model parameters. Time is in units of 2ma^2/hbar, the noise
/// strength gamma = 2ma^2 Gamma / hbar^3.
struct ModelParams {
  double gamma = 0.0;
  double dt = 1e-4;
  std::size_t n_sites = 1000;
  Boundary boundary = Boundary::open;
  std::uint64_t seed = 1;
  double t_max = 1.0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Half-open range [lo, hi) of array indices outside of which every amplitude
/// is exactly zero.
struct SiteWindow {
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t size() const { return hi - lo; }
  bool contains(std::size_t i) const { return i >= lo && i < hi; }
};

/// Single-trajectory state: complex amplitudes c_n over an N-site chain.
///
/// Amplitudes are stored split into real and imaginary arrays with a zeroed
/// margin on both sides, so stencil kernels can read one site past either end
/// of the active window without branching. Array index i corresponds to the
/// signed lattice coordinate i - origin_offset().
class WaveFunction {
 public:
  static constexpr std::size_t kPad = 8;

  WaveFunction() = default;
  WaveFunction(std::size_t n_sites, std::int64_t origin_offset, Boundary boundary);

  std::size_t size() const { return n_; }
  Boundary boundary() const { return boundary_; }
  std::int64_t origin_offset() const { return origin_; }
  std::int64_t coordinate(std::size_t i) const {
    return static_cast<std::int64_t>(i) - origin_;
  }
  /// Array index of a lattice coordinate; no bounds check.
  std::size_t index_of(std::int64_t coordinate) const {
    return static_cast<std::size_t>(coordinate + origin_);
  }

  cplx operator[](std::size_t i) const { return {re_[kPad + i], im_[kPad + i]}; }
  double weight(std::size_t i) const {
    return re_[kPad + i] * re_[kPad + i] + im_[kPad + i] * im_[kPad + i];
  }
  /// Writes one amplitude, growing the active window if needed.
  void set(std::size_t i, cplx c);
  /// Zeroes every amplitude.
  void clear();
  /// Replaces the state by the position eigenstate |i>.
  void collapse_to(std::size_t i);

  double* re() { return re_.data() + kPad; }
  double* im() { return im_.data() + kPad; }
  const double* re() const { return re_.data() + kPad; }
  const double* im() const { return im_.data() + kPad; }

  const SiteWindow& window() const { return window_; }
  /// Caller guarantees amplitudes outside [lo, hi) are zero.
  void set_window(SiteWindow w) { window_ = w; }

  double norm_sq() const;
  /// Rescales to unit norm; throws InstabilityError for a null state.
  void normalize();
  /// Copies wrapped neighbours into the ghost cells (periodic chains only).
  void fill_ghosts();

  std::vector<cplx> amplitudes() const;

 private:
  std::size_t n_ = 0;
  std::int64_t origin_ = 0;
  Boundary boundary_ = Boundary::open;
  std::vector<double> re_;
  std::vector<double> im_;
  SiteWindow window_{};
};

/// Ensemble state rho_{n,m}.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(std::size_t n) : rho_(Eigen::MatrixXcd::Zero(n, n)) {}
  explicit DensityMatrix(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {}

  static DensityMatrix from_pure(const WaveFunction& psi);
  static DensityMatrix maximally_mixed(std::size_t n);
  static DensityMatrix from_weights(const std::vector<double>& p);

  std::size_t size() const { return static_cast<std::size_t>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Eigen::MatrixXcd& matrix() { return rho_; }
  cplx operator()(std::size_t n, std::size_t m) const {
    return rho_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  }

  cplx trace() const { return rho_.trace(); }
  std::vector<double> diagonal() const;
  /// Largest |rho - rho^dagger| entry.
  double hermiticity_defect() const;
  /// Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;

 private:
  Eigen::MatrixXcd rho_;
};

enum class InitialKind { gaussian_packet, delta_site, uniform };

std::string_view to_string(InitialKind k);
InitialKind parse_initial_kind(std::string_view s);

struct InitialState {
  InitialKind kind = InitialKind::gaussian_packet;
  /// Variance of |c_n|^2 in squared lattice units.
  double variance = 4.0;
  /// Lattice coordinate of the packet centre.
  std::int64_t center = 0;
};

/// Default placement of coordinate 0 for an N-site chain: its middle site.
std::int64_t default_origin(std::size_t n_sites);

/// Builds a real, normalized initial state. Coordinate 0 sits at the middle of
/// the chain. Gaussian amplitudes are proportional to exp(-(n-c)^2 / 4 var) so
/// that the probabilities |c_n|^2 have variance `var`.
WaveFunction make_initial(const ModelParams& params, const InitialState& spec);

}  // namespace ntb
