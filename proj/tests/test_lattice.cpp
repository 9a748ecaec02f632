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
#include <vector>

#include "doctest.h"
#include "noisytb/error.hpp"
#include "noisytb/lattice.hpp"
#include "noisytb/observables.hpp"

using namespace ntb;

namespace {

ModelParams chain(std::size_t n, Boundary b = Boundary::open) {
  ModelParams p;
  p.n_sites = n;
  p.boundary = b;
  return p;
}

}  // namespace

TEST_CASE("model parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.gamma = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.dt = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.n_sites = 2;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.t_max = NAN;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("names round-trip") {
  for (auto b : {Boundary::open, Boundary::periodic}) CHECK(parse_boundary(to_string(b)) == b);
  for (auto k : {InitialKind::gaussian_packet, InitialKind::delta_site, InitialKind::uniform})
    CHECK(parse_initial_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_boundary("closed"), ConfigError);
  CHECK_THROWS_AS(parse_initial_kind("lorentzian"), ConfigError);
}

TEST_CASE("gaussian packets are real, normalized and have the requested variance") {
  for (double var : {1.0, 4.0, 25.0}) {
    CAPTURE(var);
    const WaveFunction psi = make_initial(chain(1000), {InitialKind::gaussian_packet, var, 0});
    CHECK(std::abs(psi.norm_sq() - 1.0) < 1e-14);
    for (std::size_t i = 0; i < psi.size(); ++i) CHECK(psi[i].imag() == 0.0);
    const Observation o = measure(psi);
    CHECK(std::abs(o.mean_x) < 1e-12);
    CHECK(std::abs(o.var_x - var) < 1e-6 * var);
    // |c|^2 Gaussian: P = 2 sqrt(pi) sigma.
    if (var >= 4.0) CHECK(std::abs(o.pn - 2.0 * std::sqrt(M_PI * var)) < 1e-6 * o.pn);
  }
}

TEST_CASE("delta and uniform initial states") {
  const WaveFunction d = make_initial(chain(101), {InitialKind::delta_site, 0.0, 7});
  const Observation od = measure(d);
  CHECK(od.mean_x == 7.0);
  CHECK(od.var_x == 0.0);
  CHECK(od.pn == 1.0);
  CHECK(d.window().size() == 1);

  const WaveFunction u = make_initial(chain(10), {InitialKind::uniform, 0.0, 0});
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(u.weight(i) - 0.1) < 1e-15);
  CHECK(std::abs(measure(u).pn - 10.0) < 1e-12);
}

TEST_CASE("initial states that do not fit are rejected") {
  CHECK_THROWS_AS(make_initial(chain(21), {InitialKind::gaussian_packet, 25.0, 0}),
                  ConfigError);
  CHECK_THROWS_AS(make_initial(chain(21), {InitialKind::delta_site, 0.0, 11}), ConfigError);
  CHECK_THROWS_AS(make_initial(chain(21), {InitialKind::gaussian_packet, -1.0, 0}),
                  ConfigError);
}

TEST_CASE("coordinates are centred on the middle site") {
  const WaveFunction psi(11, default_origin(11), Boundary::open);
  CHECK(psi.coordinate(5) == 0);
  CHECK(psi.coordinate(0) == -5);
  CHECK(psi.index_of(5) == 10);
}

TEST_CASE("active window tracks set, collapse and clear") {
  WaveFunction psi(50, 25, Boundary::open);
  CHECK(psi.window().size() == 0);
  psi.set(10, {0.6, 0.0});
  psi.set(20, {0.0, 0.8});
  CHECK(psi.window().lo <= 10);
  CHECK(psi.window().hi >= 21);
  CHECK(std::abs(psi.norm_sq() - 1.0) < 1e-15);
  psi.collapse_to(30);
  CHECK(psi.weight(30) == 1.0);
  CHECK(psi.weight(10) == 0.0);
  CHECK(psi.window().contains(30));
  psi.clear();
  CHECK(psi.norm_sq() == 0.0);
  CHECK_THROWS_AS(psi.normalize(), InstabilityError);
}

TEST_CASE("periodic ghosts wrap") {
  WaveFunction psi(8, 4, Boundary::periodic);
  for (std::size_t i = 0; i < 8; ++i) psi.set(i, {double(i + 1), -double(i)});
  psi.fill_ghosts();
  CHECK(psi.re()[-1] == psi.re()[7]);
  CHECK(psi.im()[-1] == psi.im()[7]);
  CHECK(psi.re()[8] == psi.re()[0]);
  CHECK(psi.im()[8] == psi.im()[0]);
}

TEST_CASE("density matrices") {
  const WaveFunction psi = make_initial(chain(9, Boundary::periodic), {InitialKind::gaussian_packet, 1.0, 0});
  const DensityMatrix rho = DensityMatrix::from_pure(psi);
  CHECK(std::abs(rho.trace() - cplx(1.0)) < 1e-14);
  CHECK(rho.hermiticity_defect() < 1e-16);
  CHECK(std::abs(rho.min_eigenvalue()) < 1e-12);
  CHECK(std::abs((rho.matrix() * rho.matrix()).trace().real() - 1.0) < 1e-13);

  const DensityMatrix mix = DensityMatrix::maximally_mixed(4);
  for (double p : mix.diagonal()) CHECK(p == 0.25);
  CHECK(std::abs(mix.min_eigenvalue() - 0.25) < 1e-15);

  const DensityMatrix w = DensityMatrix::from_weights({0.5, 0.25, 0.25});
  CHECK(w(0, 0) == cplx(0.5));
  CHECK(w(0, 1) == cplx(0.0));
}
