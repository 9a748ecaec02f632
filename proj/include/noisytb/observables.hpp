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
#include <span>
#include <string_view>
#include <vector>

#include "noisytb/lattice.hpp"

namespace ntb {

/// Single-time quantum expectations of one wave function.
struct Observation {
  double mean_x = 0.0;
  double mean_x2 = 0.0;
  double var_x = 0.0;
  double pn = 0.0;
};

/// <x>, <x^2>, sigma^2 = <x^2> - <x>^2 and participation number
/// P = 1 / sum |c_n|^4, with x the signed lattice coordinate.
Observation measure(const WaveFunction& psi);

enum class GridKind { log, linear };

/// Output time grid. Log grids place `per_decade` points per decade between
/// t_min and t_max; linear grids place `count` equal intervals. Both start
/// with t = 0 and snap every time to a whole number of steps.
struct GridSpec {
  GridKind kind = GridKind::log;
  /// First nonzero time of a log grid; 0 selects 0.1 / gamma (or t_max / 1000).
  double t_min = 0.0;
  std::size_t per_decade = 40;
  std::size_t count = 100;
};

std::string_view to_string(GridKind k);
GridKind parse_grid_kind(std::string_view s);

std::vector<double> make_grid(const GridSpec& spec, double gamma, double t_max, double dt);

struct TrajectoryRecord {
  std::vector<double> grid;
  std::vector<double> mean_x;
  std::vector<double> mean_x2;
  std::vector<double> var_x;
  std::vector<double> pn;

  void resize(std::size_t n);
  void store(std::size_t i, const Observation& o);
};

/// Streaming mean and variance (Welford), mergeable (Chan et al.).
struct RunningStats {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }
  void merge(const RunningStats& o);
  double variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
  double stderr_mean() const;
};

/// Per-time ensemble means with standard errors.
struct EnsembleSummary {
  std::vector<double> t;
  std::vector<double> mean_x2, mean_x_sq, mean_var, mean_pn;
  std::vector<double> stderr_x2, stderr_x_sq, stderr_var, stderr_pn;
  std::size_t n_trajectories = 0;
  /// gamma of the run, used to place default fit windows.
  double gamma = 0.0;
};

/// Accumulates trajectory records into an EnsembleSummary.
class EnsembleAccumulator {
 public:
  EnsembleAccumulator() = default;
  explicit EnsembleAccumulator(std::vector<double> grid);

  void add(const TrajectoryRecord& r);
  void merge(const EnsembleAccumulator& o);
  EnsembleSummary summary(double gamma) const;
  std::size_t count() const { return n_; }

 private:
  std::vector<double> grid_;
  std::vector<RunningStats> x2_, x_sq_, var_, pn_;
  std::size_t n_ = 0;
};

enum class FitModel { linear, power_law };

struct FitResult {
  FitModel model = FitModel::linear;
  /// Linear: slope and intercept. Power law: exponent and amplitude.
  double slope = 0.0;
  double intercept = 0.0;
  double exponent = 0.0;
  double amplitude = 0.0;
  double slope_stderr = 0.0;
  double exponent_stderr = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t n_points = 0;
  double residual_norm = 0.0;
};

/// Ordinary least squares y = intercept + slope x over x in [lo, hi]. Throws
/// FitError when the window holds fewer than `min_points` points.
FitResult fit_linear(std::span<const double> x, std::span<const double> y, double lo,
                     double hi, std::size_t min_points = 5);

/// Diffusion constant: slope of M<x^2>(t) - M<x^2>(0) over t in [t_lo, t_hi].
/// For gamma > 0 the window must start at gamma t >= 10.
FitResult fit_diffusion(const EnsembleSummary& s, double t_lo, double t_hi);

/// y = amplitude x^exponent by regression in log-log coordinates over
/// x in [lo, hi]. Throws FitError for nonpositive data inside the window.
FitResult fit_power_law(std::span<const double> x, std::span<const double> y, double lo,
                        double hi, std::size_t min_points = 5);

/// Time average (trapezoidal) of M[sigma^2] over gamma t in [40, end].
double asymptotic_variance(const EnsembleSummary& s, double gamma);

struct CoherenceFit {
  double tau = 0.0;
  double tau_stderr = 0.0;
  /// RMS residual of log(values) about the fitted line.
  double log_residual = 0.0;
  bool poor_fit = false;
};

/// Exponential decay time of a positive series (e.g. the norm of the first
/// off-diagonal of rho). poor_fit is set when the log-residual exceeds 1e-3.
CoherenceFit coherence_time_estimate(std::span<const double> t, std::span<const double> values);

}  // namespace ntb
