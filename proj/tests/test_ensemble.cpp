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
#include <cstdlib>
#include <string>
#include <vector>

#include "doctest.h"
#include "noisytb/ensemble.hpp"
#include "noisytb/error.hpp"

using namespace ntb;

namespace {

RunSpec small_spec(Unravelling u, double gamma, std::size_t n_traj) {
  RunSpec s;
  s.params.gamma = gamma;
  s.params.dt = 1e-4;
  s.params.n_sites = 201;
  s.params.t_max = 0.2;
  s.params.seed = 17;
  s.unravelling = {u, QsdNoise::complex};
  s.initial = {InitialKind::gaussian_packet, 4.0, 0};
  s.n_trajectories = n_traj;
  s.grid.per_decade = 10;
  return s;
}

bool same(const EnsembleSummary& a, const EnsembleSummary& b) {
  return a.t == b.t && a.mean_x2 == b.mean_x2 && a.mean_x_sq == b.mean_x_sq &&
         a.mean_var == b.mean_var && a.mean_pn == b.mean_pn && a.stderr_x2 == b.stderr_x2 &&
         a.stderr_x_sq == b.stderr_x_sq && a.stderr_var == b.stderr_var &&
         a.stderr_pn == b.stderr_pn && a.n_trajectories == b.n_trajectories;
}

}  // namespace

TEST_CASE("single noiseless trajectory reproduces free spreading") {
  RunSpec s = small_spec(Unravelling::jump_event_driven, 0.0, 1);
  s.params.n_sites = 1000;
  s.params.t_max = 10.0;
  s.initial = {InitialKind::delta_site, 0.0, 0};
  const EnsembleResult r = run_ensemble(s);
  REQUIRE(r.summary.t.size() > 10);
  for (std::size_t i = 0; i < r.summary.t.size(); ++i) {
    const double t = r.summary.t[i];
    CHECK(std::abs(r.summary.mean_var[i] - 2 * t * t) <= 1e-10 * (1 + 2 * t * t));
    CHECK(r.summary.stderr_var[i] == 0.0);
  }
}

TEST_CASE("results do not depend on the worker count") {
  for (Unravelling u : {Unravelling::wnp, Unravelling::qsd, Unravelling::jump_event_driven}) {
    CAPTURE(to_string(u));
    RunSpec s = small_spec(u, 5.0, 50);
    s.persist_trajectories = true;
    s.workers = 1;
    const EnsembleResult one = run_ensemble(s);
    for (std::size_t w : {2u, 3u, 5u}) {
      s.workers = w;
      const EnsembleResult many = run_ensemble(s);
      CHECK(many.workers == w);
      CHECK(same(one.summary, many.summary));
    }
    REQUIRE(one.records.size() == 50);
    const auto grid = one.summary.t;
    const TrajectoryRecord again = run_trajectory(s, 37, grid);
    CHECK(again.mean_x2 == one.records[37].mean_x2);
    CHECK(again.pn == one.records[37].pn);
  }
}

TEST_CASE("different seeds give different ensembles") {
  RunSpec s = small_spec(Unravelling::wnp, 5.0, 16);
  s.workers = 1;
  const auto a = run_ensemble(s).summary;
  s.params.seed = 18;
  const auto b = run_ensemble(s).summary;
  CHECK(a.mean_x_sq != b.mean_x_sq);
}

TEST_CASE("progress reports every chunk") {
  RunSpec s = small_spec(Unravelling::wnp, 1.0, 40);
  s.params.t_max = 0.01;
  s.workers = 2;
  std::vector<std::size_t> seen;
  run_ensemble(s, [&](std::size_t done, std::size_t total) {
    CHECK(total == 40);
    seen.push_back(done);
  });
  REQUIRE(seen.size() == 3);
  CHECK(seen.back() == 40);
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i] > seen[i - 1]);
}

TEST_CASE("a failing trajectory aborts with replay information") {
  RunSpec s = small_spec(Unravelling::wnp, 1.0, 20);
  s.params.n_sites = 41;
  s.params.t_max = 30.0;
  s.initial.variance = 1.0;
  s.workers = 3;
  try {
    run_ensemble(s);
    FAIL("expected SimulationAbort");
  } catch (const SimulationAbort& e) {
    CHECK(e.trajectory() == 0);
    CHECK(e.base_seed() == 17);
    CHECK(e.trajectory_seed() == mix_seed(17, 0));
    CHECK(std::string(e.what()).find("step") != std::string::npos);
    const std::vector<double> grid{0.0, 30.0};
    CHECK_THROWS_AS(run_trajectory(s, e.trajectory(), grid), SimulationAbort);
  }
}

TEST_CASE("configuration problems surface as ConfigError") {
  RunSpec s = small_spec(Unravelling::jump, 20.0, 4);
  s.params.dt = 1e-3;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_THROWS_AS(run_ensemble(s), ConfigError);

  RunSpec z = small_spec(Unravelling::wnp, 1.0, 0);
  CHECK_THROWS_AS(run_ensemble(z), ConfigError);

  RunSpec m = small_spec(Unravelling::wnp, 1.0, 1000000);
  m.persist_trajectories = true;
  m.memory_budget_bytes = 1 << 20;
  CHECK_THROWS_AS(run_ensemble(m), ConfigError);
  CHECK(estimate_memory(m, 1) > m.memory_budget_bytes);

  RunSpec g = small_spec(Unravelling::wnp, 1.0, 1);
  const std::vector<double> off_grid{0.0, 1.5e-4};
  CHECK_THROWS_AS(run_trajectory(g, 0, off_grid), ConfigError);

  RunSpec wide = small_spec(Unravelling::wnp, 1.0, 1);
  wide.params.n_sites = 11;
  CHECK_THROWS_AS(run_ensemble(wide), ConfigError);
}

TEST_CASE("worker count resolution") {
  CHECK(resolve_workers(4) == 4);
  ::setenv(kWorkersEnv, "3", 1);
  CHECK(resolve_workers(0) == 3);
  ::setenv(kWorkersEnv, "many", 1);
  CHECK_THROWS_AS(resolve_workers(0), ConfigError);
  ::setenv(kWorkersEnv, "0", 1);
  CHECK_THROWS_AS(resolve_workers(0), ConfigError);
  ::unsetenv(kWorkersEnv);
  CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("Bonferroni correction") {
  CHECK(bonferroni_z(3.0, 1) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(bonferroni_z(0.0, 100) == 0.0);
  CHECK(bonferroni_z(-3.0, 1) == doctest::Approx(3.0).epsilon(1e-10));
  for (double z : {3.5, 5.0, 6.0}) {
    const double c = bonferroni_z(z, 1000);
    CHECK(c < z);
    CHECK(std::erfc(c / std::sqrt(2.0)) == doctest::Approx(1000 * std::erfc(z / std::sqrt(2.0))).epsilon(1e-8));
  }
  CHECK(bonferroni_z(1.0, 1000) == 0.0);
  CHECK(bonferroni_z(5.0, 10) > bonferroni_z(5.0, 100));
}

TEST_CASE("comparison spec validation") {
  CompareSpec c;
  c.params.n_sites = 7;
  c.params.boundary = Boundary::open;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.params.boundary = Boundary::periodic;
  CHECK_NOTHROW(c.validate());
  c.params.n_sites = 16;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.params.n_sites = 7;
  c.checkpoints = {1.0, 0.5};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("noiseless comparison control") {
  CompareSpec c;
  c.params.n_sites = 7;
  c.params.boundary = Boundary::periodic;
  c.params.gamma = 0.0;
  c.n_trajectories = 16;
  c.checkpoints = {0.5, 1.0};
  const CompareReport r = compare_unravellings(c);
  CHECK(r.pass);
  CHECK(r.n_tests == 3 * 2 * 49);
  CHECK(r.max_abs_z < 0.5);
  for (const auto& e : r.elements) CHECK(e.stderr_mean < 1e-12);
}

TEST_CASE("unravellings agree with the master equation on a small ring") {
  CompareSpec c;
  c.params.n_sites = 7;
  c.params.boundary = Boundary::periodic;
  c.params.gamma = 4.0;
  c.n_trajectories = 1000;
  c.checkpoints = {0.5, 1.0};
  c.kinds = {{Unravelling::qsd, QsdNoise::complex}, {Unravelling::jump_event_driven, QsdNoise::complex}};
  const CompareReport r = compare_unravellings(c);
  CHECK(r.pass);
  CHECK(r.max_corrected_z < 4.0);

  c.oracle_gamma = 12.0;
  c.kinds = {{Unravelling::jump_event_driven, QsdNoise::complex}};
  const CompareReport bad = compare_unravellings(c);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_corrected_z > 4.0);
}
