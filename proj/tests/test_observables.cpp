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
#include <random>
#include <vector>

#include "doctest.h"
#include "noisytb/error.hpp"
#include "noisytb/observables.hpp"
#include "test_util.hpp"

using namespace ntb;

TEST_CASE("measure on hand-built states") {
  WaveFunction psi(11, 5, Boundary::open);
  psi.set(psi.index_of(-2), std::sqrt(0.25));
  psi.set(psi.index_of(2), cplx(0, std::sqrt(0.75)));
  const Observation o = measure(psi);
  CHECK(o.mean_x == doctest::Approx(1.0));
  CHECK(o.mean_x2 == doctest::Approx(4.0));
  CHECK(o.var_x == doctest::Approx(3.0));
  CHECK(o.pn == doctest::Approx(1.0 / (0.0625 + 0.5625)));
}

TEST_CASE("grids start at zero, are ascending and snap to whole steps") {
  const double dt = 1e-4;
  GridSpec g;
  g.per_decade = 10;
  const auto t = make_grid(g, 10.0, 10.0, dt);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == doctest::Approx(10.0));
  CHECK(t[1] == doctest::Approx(0.01));
  for (std::size_t i = 1; i < t.size(); ++i) {
    CHECK(t[i] > t[i - 1]);
    CHECK(std::abs(t[i] / dt - std::round(t[i] / dt)) < 1e-6);
  }
  // Three decades, ten per decade, plus t = 0.
  CHECK(t.size() == 32);

  GridSpec lin;
  lin.kind = GridKind::linear;
  lin.count = 4;
  const auto l = make_grid(lin, 0.0, 2.0, 1e-3);
  CHECK(l == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});

  CHECK_THROWS_AS(make_grid(g, 1.0, 0.0, dt), ConfigError);
  lin.count = 0;
  CHECK_THROWS_AS(make_grid(lin, 1.0, 1.0, dt), ConfigError);
  CHECK(parse_grid_kind(to_string(GridKind::linear)) == GridKind::linear);
  CHECK_THROWS_AS(parse_grid_kind("cubic"), ConfigError);
}

TEST_CASE("running statistics agree with two-pass formulas and merge exactly") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(3.0, 2.0);
  std::vector<double> v(1001);
  for (auto& x : v) x = g(rng);
  RunningStats all, a, b;
  for (std::size_t i = 0; i < v.size(); ++i) {
    all.add(v[i]);
    (i < 400 ? a : b).add(v[i]);
  }
  a.merge(b);
  const auto m = ntb_test::moments(v);
  CHECK(all.mean == doctest::Approx(m.mean).epsilon(1e-13));
  CHECK(all.variance() == doctest::Approx(m.var).epsilon(1e-12));
  CHECK(all.stderr_mean() == doctest::Approx(m.se).epsilon(1e-12));
  CHECK(a.mean == doctest::Approx(all.mean).epsilon(1e-13));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  RunningStats empty;
  empty.merge(all);
  CHECK(empty.mean == all.mean);
  CHECK(empty.count == all.count);
}

TEST_CASE("standard errors shrink as 1/sqrt(M)") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  RunningStats s1, s4;
  for (int i = 0; i < 10000; ++i) s1.add(g(rng));
  for (int i = 0; i < 40000; ++i) s4.add(g(rng));
  CHECK(s1.stderr_mean() / s4.stderr_mean() == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("ensemble accumulator") {
  const std::vector<double> grid{0.0, 1.0};
  TrajectoryRecord r1, r2;
  r1.grid = r2.grid = grid;
  r1.resize(2);
  r2.resize(2);
  r1.store(0, {1.0, 2.0, 1.0, 1.5});
  r1.store(1, {2.0, 5.0, 1.0, 2.0});
  r2.store(0, {-1.0, 4.0, 3.0, 2.5});
  r2.store(1, {0.0, 3.0, 3.0, 1.0});
  EnsembleAccumulator a(grid), b(grid);
  a.add(r1);
  b.add(r2);
  a.merge(b);
  const EnsembleSummary s = a.summary(2.0);
  CHECK(s.n_trajectories == 2);
  CHECK(s.gamma == 2.0);
  CHECK(s.mean_x2[0] == 3.0);
  CHECK(s.mean_x_sq[0] == 1.0);
  CHECK(s.mean_var[1] == 2.0);
  CHECK(s.mean_pn[1] == 1.5);
  CHECK(s.stderr_x2[0] == doctest::Approx(1.0));
}

TEST_CASE("linear fits") {
  std::vector<double> x, y;
  for (int i = 0; i <= 20; ++i) {
    x.push_back(i);
    y.push_back(4.0 * i + 1.5);
  }
  const FitResult f = fit_linear(x, y, 0.0, 20.0);
  CHECK(f.slope == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(f.n_points == 21);
  CHECK(f.slope_stderr < 1e-12);
  CHECK(fit_linear(x, y, 5.0, 9.0).n_points == 5);
  CHECK_THROWS_AS(fit_linear(x, y, 5.0, 8.0), FitError);
  CHECK_THROWS_AS(fit_linear(std::vector<double>(6, 1.0), std::vector<double>(6, 2.0), 0, 2),
                  FitError);
}

TEST_CASE("diffusion fit enforces the gamma t >= 10 window") {
  EnsembleSummary s;
  s.gamma = 10.0;
  for (int i = 0; i <= 100; ++i) {
    s.t.push_back(0.1 * i);
    s.mean_x2.push_back(4.0 + 0.4 * 0.1 * i);
  }
  const FitResult f = fit_diffusion(s, 1.0, 10.0);
  CHECK(f.slope == doctest::Approx(0.4).epsilon(1e-12));
  CHECK_THROWS_AS(fit_diffusion(s, 0.5, 10.0), FitError);
}

TEST_CASE("power-law fits") {
  std::vector<double> x, y;
  for (int i = 1; i <= 30; ++i) {
    x.push_back(0.5 * i);
    y.push_back(3.0 * std::pow(0.5 * i, -1.76));
  }
  const FitResult f = fit_power_law(x, y, 1.0, 15.0);
  CHECK(f.exponent == doctest::Approx(-1.76).epsilon(1e-12));
  CHECK(f.amplitude == doctest::Approx(3.0).epsilon(1e-12));
  y[5] = -1.0;
  CHECK_THROWS_AS(fit_power_law(x, y, 0.0, 15.0), FitError);
  CHECK_NOTHROW(fit_power_law(x, y, 4.0, 15.0));
}

TEST_CASE("asymptotic variance averages over gamma t >= 40") {
  EnsembleSummary s;
  for (int i = 0; i <= 100; ++i) {
    s.t.push_back(0.1 * i);
    s.mean_var.push_back(i * 0.1 < 4.0 ? 100.0 : 2.5);
  }
  CHECK(asymptotic_variance(s, 10.0) == doctest::Approx(2.5).epsilon(1e-12));
  s.mean_var.assign(s.t.size(), 0.0);
  for (std::size_t i = 0; i < s.t.size(); ++i) s.mean_var[i] = s.t[i];
  // Mean of t over [4, 10].
  CHECK(asymptotic_variance(s, 10.0) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK_THROWS_AS(asymptotic_variance(s, 2.0), RangeError);
  CHECK_THROWS_AS(asymptotic_variance(s, 0.0), RangeError);
}

TEST_CASE("coherence time from an exponential decay") {
  std::vector<double> t, v;
  for (int i = 0; i <= 50; ++i) {
    t.push_back(0.01 * i);
    v.push_back(0.3 * std::exp(-t.back() / 0.1));
  }
  const CoherenceFit c = coherence_time_estimate(t, v);
  CHECK(c.tau == doctest::Approx(0.1).epsilon(1e-10));
  CHECK_FALSE(c.poor_fit);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= 1.0 + 0.2 * std::sin(7.0 * t[i]);
  CHECK(coherence_time_estimate(t, v).poor_fit);
  v.assign(v.size(), 1.0);
  CHECK_THROWS_AS(coherence_time_estimate(t, v), FitError);
}
