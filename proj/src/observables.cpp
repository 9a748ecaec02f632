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

#include "noisytb/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "noisytb/error.hpp"

namespace ntb {

Observation measure(const WaveFunction& psi) {
  const auto& w = psi.window();
  double sp = 0.0, sx = 0.0, sx2 = 0.0, sp2 = 0.0;
  for (std::size_t i = w.lo; i < w.hi; ++i) {
    const double p = psi.weight(i);
    const double x = double(psi.coordinate(i));
    sp += p;
    sx += p * x;
    sx2 += p * x * x;
    sp2 += p * p;
  }
  Observation o;
  o.mean_x = sx / sp;
  o.mean_x2 = sx2 / sp;
  // Second pass about the mean keeps sigma^2 accurate for narrow packets far
  // from the origin.
  double sv = 0.0;
  for (std::size_t i = w.lo; i < w.hi; ++i) {
    const double d = double(psi.coordinate(i)) - o.mean_x;
    sv += psi.weight(i) * d * d;
  }
  o.var_x = sv / sp;
  o.pn = sp * sp / sp2;
  return o;
}

std::string_view to_string(GridKind k) { return k == GridKind::log ? "log" : "linear"; }

GridKind parse_grid_kind(std::string_view s) {
  if (s == "log") return GridKind::log;
  if (s == "linear") return GridKind::linear;
  throw ConfigError("unknown grid kind '" + std::string(s) + "' (expected log|linear)");
}

std::vector<double> make_grid(const GridSpec& spec, double gamma, double t_max, double dt) {
  if (!(t_max > 0.0) || !(dt > 0.0)) throw ConfigError("grid needs t_max > 0 and dt > 0");
  const auto last = static_cast<long long>(std::llround(t_max / dt));
  std::vector<long long> steps{0};
  if (spec.kind == GridKind::linear) {
    if (spec.count == 0) throw ConfigError("linear grid needs count >= 1");
    for (std::size_t k = 1; k <= spec.count; ++k)
      steps.push_back(std::llround(double(k) * double(last) / double(spec.count)));
  } else {
    if (spec.per_decade == 0) throw ConfigError("log grid needs per_decade >= 1");
    double t_min = spec.t_min;
    if (t_min <= 0.0) t_min = gamma > 0.0 ? std::min(0.1 / gamma, t_max) : t_max / 1000.0;
    const double decades = std::log10(t_max / t_min);
    const auto n = static_cast<std::size_t>(std::ceil(decades * double(spec.per_decade) - 1e-9));
    for (std::size_t k = 0; k <= n; ++k) {
      const double t = std::min(t_max, t_min * std::pow(10.0, double(k) / double(spec.per_decade)));
      steps.push_back(std::llround(t / dt));
    }
    steps.push_back(last);
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  std::vector<double> grid;
  grid.reserve(steps.size());
  for (long long s : steps)
    if (s >= 0 && s <= last) grid.push_back(double(s) * dt);
  return grid;
}

void TrajectoryRecord::resize(std::size_t n) {
  mean_x.assign(n, 0.0);
  mean_x2.assign(n, 0.0);
  var_x.assign(n, 0.0);
  pn.assign(n, 0.0);
}

void TrajectoryRecord::store(std::size_t i, const Observation& o) {
  mean_x[i] = o.mean_x;
  mean_x2[i] = o.mean_x2;
  var_x[i] = o.var_x;
  pn[i] = o.pn;
}

void RunningStats::merge(const RunningStats& o) {
  if (o.count == 0.0) return;
  if (count == 0.0) {
    *this = o;
    return;
  }
  const double n = count + o.count;
  const double d = o.mean - mean;
  mean += d * o.count / n;
  m2 += o.m2 + d * d * count * o.count / n;
  count = n;
}

double RunningStats::stderr_mean() const {
  return count > 1.0 ? std::sqrt(variance() / count) : 0.0;
}

EnsembleAccumulator::EnsembleAccumulator(std::vector<double> grid)
    : grid_(std::move(grid)),
      x2_(grid_.size()),
      x_sq_(grid_.size()),
      var_(grid_.size()),
      pn_(grid_.size()) {}

void EnsembleAccumulator::add(const TrajectoryRecord& r) {
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    x2_[i].add(r.mean_x2[i]);
    x_sq_[i].add(r.mean_x[i] * r.mean_x[i]);
    var_[i].add(r.var_x[i]);
    pn_[i].add(r.pn[i]);
  }
  ++n_;
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    x2_[i].merge(o.x2_[i]);
    x_sq_[i].merge(o.x_sq_[i]);
    var_[i].merge(o.var_[i]);
    pn_[i].merge(o.pn_[i]);
  }
  n_ += o.n_;
}

EnsembleSummary EnsembleAccumulator::summary(double gamma) const {
  EnsembleSummary s;
  s.t = grid_;
  s.n_trajectories = n_;
  s.gamma = gamma;
  const std::size_t n = grid_.size();
  for (auto* v : {&s.mean_x2, &s.mean_x_sq, &s.mean_var, &s.mean_pn, &s.stderr_x2,
                  &s.stderr_x_sq, &s.stderr_var, &s.stderr_pn})
    v->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.mean_x2[i] = x2_[i].mean;
    s.mean_x_sq[i] = x_sq_[i].mean;
    s.mean_var[i] = var_[i].mean;
    s.mean_pn[i] = pn_[i].mean;
    s.stderr_x2[i] = x2_[i].stderr_mean();
    s.stderr_x_sq[i] = x_sq_[i].stderr_mean();
    s.stderr_var[i] = var_[i].stderr_mean();
    s.stderr_pn[i] = pn_[i].stderr_mean();
  }
  return s;
}

FitResult fit_linear(std::span<const double> x, std::span<const double> y, double lo,
                     double hi, std::size_t min_points) {
  if (x.size() != y.size()) throw FitError("x and y differ in length");
  double n = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo || x[i] > hi) continue;
    n += 1.0;
    sx += x[i];
    sy += y[i];
  }
  if (n < double(std::max<std::size_t>(min_points, 2)))
    throw FitError("fit window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                   "] holds fewer than " + std::to_string(min_points) + " points");
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo || x[i] > hi) continue;
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit window has no spread in x");
  FitResult f;
  f.model = FitModel::linear;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo || x[i] > hi) continue;
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    rss += r * r;
  }
  f.residual_norm = std::sqrt(rss);
  f.slope_stderr = n > 2.0 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
  f.window_lo = lo;
  f.window_hi = hi;
  f.n_points = static_cast<std::size_t>(n);
  return f;
}

FitResult fit_diffusion(const EnsembleSummary& s, double t_lo, double t_hi) {
  if (s.t.empty()) throw FitError("empty summary");
  if (s.gamma > 0.0 && s.gamma * t_lo < 10.0 - 1e-9)
    throw FitError("diffusion fit window must start at gamma t >= 10 (got " +
                   std::to_string(s.gamma * t_lo) + ")");
  std::vector<double> y(s.t.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = s.mean_x2[i] - s.mean_x2.front();
  return fit_linear(s.t, y, t_lo, t_hi);
}

FitResult fit_power_law(std::span<const double> x, std::span<const double> y, double lo,
                        double hi, std::size_t min_points) {
  if (x.size() != y.size()) throw FitError("x and y differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo || x[i] > hi) continue;
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw FitError("power-law fit needs positive data inside the window");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.empty()) throw FitError("power-law fit window is empty");
  FitResult lin = fit_linear(lx, ly, -INFINITY, INFINITY, min_points);
  FitResult f;
  f.model = FitModel::power_law;
  f.exponent = lin.slope;
  f.exponent_stderr = lin.slope_stderr;
  f.amplitude = std::exp(lin.intercept);
  f.slope = lin.slope;
  f.intercept = lin.intercept;
  f.slope_stderr = lin.slope_stderr;
  f.residual_norm = lin.residual_norm;
  f.n_points = lin.n_points;
  f.window_lo = lo;
  f.window_hi = hi;
  if (!std::isfinite(f.exponent)) throw FitError("power-law exponent is not finite");
  return f;
}

double asymptotic_variance(const EnsembleSummary& s, double gamma) {
  if (!(gamma > 0.0)) throw RangeError("asymptotic variance needs gamma > 0");
  const double start = 40.0 / gamma;
  if (s.t.empty() || s.t.back() <= start * (1.0 + 1e-12))
    throw RangeError("series must extend past gamma t = 40");
  // Interpolate the window start so the average covers exactly [start, end].
  double area = 0.0;
  for (std::size_t i = 1; i < s.t.size(); ++i) {
    double t0 = s.t[i - 1], t1 = s.t[i];
    if (t1 <= start) continue;
    double y0 = s.mean_var[i - 1], y1 = s.mean_var[i];
    if (t0 < start) {
      y0 = y0 + (y1 - y0) * (start - t0) / (t1 - t0);
      t0 = start;
    }
    area += 0.5 * (y0 + y1) * (t1 - t0);
  }
  return area / (s.t.back() - start);
}

CoherenceFit coherence_time_estimate(std::span<const double> t,
                                     std::span<const double> values) {
  if (t.size() != values.size()) throw FitError("t and values differ in length");
  std::vector<double> ly(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw FitError("decay series must stay positive");
    ly[i] = std::log(values[i]);
  }
  const FitResult f = fit_linear(t, ly, -INFINITY, INFINITY);
  if (!(f.slope < 0.0)) throw FitError("series does not decay");
  CoherenceFit c;
  c.tau = -1.0 / f.slope;
  c.tau_stderr = f.slope_stderr / (f.slope * f.slope);
  c.log_residual = f.residual_norm / std::sqrt(double(f.n_points));
  c.poor_fit = c.log_residual > 1e-3;
  return c;
}

}  // namespace ntb
