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

#include "noisytb/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "noisytb/error.hpp"

namespace ntb {

namespace {

constexpr double kMaxCorrection = 1e-9;
constexpr double kMinDiagonal = -1e-10;
constexpr double kMinEigenvalue = -1e-8;

using Index = Eigen::Index;

}  // namespace

LindbladSolver::LindbladSolver(const ModelParams& params, double dt)
    : params_(params), dt_(dt) {
  params_.validate();
  if (params_.n_sites > kMaxLindbladSites)
    throw ConfigError("dense Lindblad integration supports at most " +
                      std::to_string(kMaxLindbladSites) + " sites");
  if (!(dt_ > 0.0)) throw ConfigError("Lindblad dt must be > 0");
}

Eigen::MatrixXcd LindbladSolver::rhs(const Eigen::MatrixXcd& rho) const {
  const Index n = rho.rows();
  const bool periodic = params_.boundary == Boundary::periodic;
  const double g = params_.gamma;
  Eigen::MatrixXcd out(n, n);
  auto at = [&](Index a, Index b) -> cplx {
    if (periodic) return rho((a + n) % n, (b + n) % n);
    if (a < 0 || a >= n || b < 0 || b >= n) return {};
    return rho(a, b);
  };
  const cplx i_unit{0.0, 1.0};
  for (Index m = 0; m < n; ++m) {
    for (Index r = 0; r < n; ++r) {
      const cplx hop = at(r + 1, m) + at(r - 1, m) - at(r, m + 1) - at(r, m - 1);
      out(r, m) = i_unit * hop - (r == m ? cplx{} : g * rho(r, m));
    }
  }
  return out;
}

StepCorrections LindbladSolver::step(LindbladState& s) const {
  Eigen::MatrixXcd& rho = s.rho.matrix();
  const double h = dt_;
  const Eigen::MatrixXcd k1 = rhs(rho);
  const Eigen::MatrixXcd k2 = rhs(rho + 0.5 * h * k1);
  const Eigen::MatrixXcd k3 = rhs(rho + 0.5 * h * k2);
  const Eigen::MatrixXcd k4 = rhs(rho + h * k3);
  rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  s.t += h;

  StepCorrections c;
  c.hermiticity = 0.5 * (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double tr = rho.trace().real();
  c.trace = std::abs(tr - 1.0);
  rho /= tr;
  if (c.hermiticity > kMaxCorrection || c.trace > kMaxCorrection)
    throw IntegrationError("Lindblad step needed a correction of " +
                           std::to_string(std::max(c.hermiticity, c.trace)) + " at t = " +
                           std::to_string(s.t));
  for (Index i = 0; i < rho.rows(); ++i)
    if (rho(i, i).real() < kMinDiagonal)
      throw IntegrationError("negative diagonal entry " + std::to_string(rho(i, i).real()) +
                             " at t = " + std::to_string(s.t) + "; reduce dt");
  return c;
}

void LindbladSolver::evolve(LindbladState& s, double t_end,
                            const std::function<void(const LindbladState&)>& observe,
                            std::size_t every) const {
  const auto steps = static_cast<long long>(std::llround((t_end - s.t) / dt_));
  if (every == 0) every = 1;
  if (observe) observe(s);
  for (long long k = 1; k <= steps; ++k) {
    step(s);
    if (observe && (k % static_cast<long long>(every) == 0 || k == steps)) observe(s);
  }
  check_positivity(s.rho);
}

LindbladState lindblad_initial(const ModelParams& params, const InitialState& spec) {
  return {DensityMatrix::from_pure(make_initial(params, spec)), 0.0};
}

void check_positivity(const DensityMatrix& rho) {
  if (rho.size() > kMaxPositivitySites) return;
  const double lam = rho.min_eigenvalue();
  if (lam < kMinEigenvalue)
    throw IntegrationError("density matrix lost positivity (eigenvalue " +
                           std::to_string(lam) + ")");
}

std::vector<double> offdiagonal_profile(const DensityMatrix& rho, std::size_t k_max,
                                        Boundary boundary) {
  const std::size_t n = rho.size();
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, rho(i, i).real());
  std::vector<double> out(k_max + 1, 0.0);
  for (std::size_t k = 0; k <= k_max && k < n; ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = i + k;
      if (r >= n) {
        if (boundary != Boundary::periodic) break;
        r -= n;
      }
      m = std::max(m, std::abs(rho(r, i)));
    }
    out[k] = m / peak;
  }
  return out;
}

std::vector<cplx> adiabatic_offdiagonals(std::span<const double> p, double gamma,
                                         Boundary boundary) {
  const std::size_t n = p.size();
  const std::size_t bonds = boundary == Boundary::periodic ? n : (n > 0 ? n - 1 : 0);
  std::vector<cplx> out(bonds);
  for (std::size_t b = 0; b < bonds; ++b)
    out[b] = cplx{0.0, (p[b] - p[(b + 1) % n]) / gamma};
  return out;
}

std::vector<cplx> first_offdiagonal(const DensityMatrix& rho, Boundary boundary) {
  const std::size_t n = rho.size();
  const std::size_t bonds = boundary == Boundary::periodic ? n : (n > 0 ? n - 1 : 0);
  std::vector<cplx> out(bonds);
  for (std::size_t b = 0; b < bonds; ++b) out[b] = rho((b + 1) % n, b);
  return out;
}

double first_offdiagonal_norm(const DensityMatrix& rho, Boundary boundary) {
  double s = 0.0;
  for (const cplx& c : first_offdiagonal(rho, boundary)) s += std::norm(c);
  return std::sqrt(s);
}

std::vector<double> reduced_diffusion_step(std::span<const double> p, double gamma, double dt,
                                           Boundary boundary) {
  if (!(gamma > 0.0)) throw ConfigError("reduced diffusion needs gamma > 0");
  if (dt * 4.0 / gamma > 0.5)
    throw InstabilityError("reduced diffusion step unstable: dt 4 / gamma = " +
                           std::to_string(dt * 4.0 / gamma) + " > 0.5");
  const std::size_t n = p.size();
  const double a = 2.0 * dt / gamma;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double left, right;
    if (boundary == Boundary::periodic) {
      left = p[(i + n - 1) % n];
      right = p[(i + 1) % n];
    } else {
      left = i > 0 ? p[i - 1] : p[i];
      right = i + 1 < n ? p[i + 1] : p[i];
    }
    out[i] = p[i] + a * (left + right - 2.0 * p[i]);
  }
  return out;
}

std::vector<double> reduced_diffusion_evolve(std::vector<double> p, double gamma, double t,
                                             double dt, Boundary boundary) {
  const auto steps = std::llround(t / dt);
  for (long long k = 0; k < steps; ++k) p = reduced_diffusion_step(p, gamma, dt, boundary);
  return p;
}

DensityMatrix translation_invariant_mode(std::size_t n, std::size_t k, double amplitude) {
  DensityMatrix d = DensityMatrix::maximally_mixed(n);
  if (k == 0 || k >= n) return d;
  auto& m = d.matrix();
  const double v = amplitude / double(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Index>((i + k) % n);
    const auto c = static_cast<Index>(i);
    m(r, c) += v;
    m(c, r) += v;
  }
  return d;
}

DecaySeries coherence_decay_series(double gamma, std::size_t n_sites, double t_end,
                                   std::size_t samples, double dt) {
  ModelParams mp;
  mp.gamma = gamma;
  mp.n_sites = n_sites;
  mp.boundary = Boundary::periodic;
  mp.t_max = t_end;
  const LindbladSolver solver(mp, dt);
  LindbladState s{translation_invariant_mode(n_sites, 1, 0.5), 0.0};
  const auto total = static_cast<std::size_t>(std::llround(t_end / dt));
  const std::size_t every = std::max<std::size_t>(1, total / std::max<std::size_t>(1, samples));
  DecaySeries out;
  solver.evolve(
      s, t_end,
      [&](const LindbladState& st) {
        out.t.push_back(st.t);
        out.values.push_back(first_offdiagonal_norm(st.rho, Boundary::periodic));
      },
      every);
  return out;
}

LindbladObservation observe_lindblad(const LindbladState& s, Boundary boundary) {
  const auto& m = s.rho.matrix();
  const std::size_t n = s.rho.size();
  const auto origin = default_origin(n);
  LindbladObservation o;
  o.t = s.t;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = s.rho(i, i).real();
    const double x = double(static_cast<std::int64_t>(i) - origin);
    o.trace += p;
    o.mean_x += p * x;
    o.mean_x2 += p * x * x;
  }
  o.purity = m.cwiseAbs2().sum();
  o.coherence = first_offdiagonal_norm(s.rho, boundary);
  return o;
}

}  // namespace ntb
