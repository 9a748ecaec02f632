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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "noisytb/ensemble.hpp"
#include "noisytb/error.hpp"
#include "noisytb/hamiltonian.hpp"
#include "noisytb/io.hpp"
#include "noisytb/lindblad.hpp"
#include "noisytb/observables.hpp"
#include "noisytb/unravellings.hpp"
#include "test_util.hpp"

namespace {

using namespace ntb;

bool full_scale() {
  const char* v = std::getenv("NTB_ACCEPTANCE_FULL");
  return v != nullptr && std::string(v) == "1";
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

EnsembleSummary run_config(const Config& cfg) { return run_ensemble(to_run_spec(cfg)).summary; }

/// Summaries keyed by preset name and trajectory count, shared between criteria.
const EnsembleSummary& preset_summary(const std::string& name, std::size_t trajectories,
                                      std::optional<double> t_max = {},
                                      std::optional<double> dt = {}) {
  static std::map<std::string, EnsembleSummary> cache;
  const std::string key = name + "/" + std::to_string(trajectories) + "/" +
                          (t_max ? format_double(*t_max) : std::string("-")) + "/" +
                          (dt ? format_double(*dt) : std::string("-"));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Config cfg = find_preset(name).config;
  cfg.trajectories = trajectories;
  if (t_max) cfg.model.t_max = *t_max;
  if (dt) cfg.model.dt = *dt;
  const EnsembleSummary& s = cache.emplace(key, run_config(cfg)).first->second;
  if (const char* dir = std::getenv("NTB_ACCEPTANCE_CSV_DIR"))
    write_summary_csv(std::string(dir) + "/" + name + ".csv", s, cfg);
  return s;
}

Verdict diffusion() {
  const bool full = full_scale();
  const std::size_t n = full ? 10000 : 2000;
  const double tol = full ? 0.05 : 0.10;
  Verdict v{true, ""};
  for (double g : {5.0, 10.0, 20.0}) {
    // Euler-Maruyama adds spurious centre-of-mass diffusion of relative size ~ gamma^3 dt.
    const double dt = std::min(1e-4, 0.1 / (g * g * g));
    for (const std::string prefix : {"fig1-gamma", "fig1-qsd-gamma"}) {
      const EnsembleSummary& s = preset_summary(prefix + format_double(g), n, {}, dt);
      const FitResult f = fit_diffusion(s, 10.0 / g, 100.0 / g);
      const double r = f.slope * g / 4.0;
      v.pass = v.pass && std::abs(r - 1.0) < tol;
      v.detail += (prefix == "fig1-gamma" ? "wnp" : "qsd") + std::string("(") + format_double(g) +
                  ", dt " + format_double(dt) + ") D*gamma/4=" + fmt(r) + " ";
    }
  }
  v.detail += "tol " + fmt(tol) + ", " + std::to_string(n) + " trajectories";
  return v;
}

Verdict free_spreading() {
  ModelParams p;
  p.n_sites = 201;
  const WaveFunction delta = make_initial(p, {InitialKind::delta_site, 0, 0});
  double worst = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double t = 0.5 * k;
    const double var = measure(free_evolve(delta, t)).var_x;
    worst = std::max(worst, std::abs(var / (2.0 * t * t) - 1.0));
  }
  return {worst < 1e-3, "max relative deviation from 2t^2 over t <= 10: " + fmt(worst)};
}

Verdict jump_statistics() {
  const double gamma = 2.0;
  const std::size_t jumps = 100000;
  ModelParams p;
  p.gamma = gamma;
  p.n_sites = 2048;
  p.boundary = Boundary::periodic;
  p.t_max = 1.05 * double(jumps) / gamma;
  p.seed = 2024;
  const UnravellingKind kind{Unravelling::jump_event_driven};
  const WaveFunction delta = make_initial(p, {InitialKind::delta_site, 0, 0});
  const std::vector<double> grid0{0.0};
  const JumpLog log = jump_event_driven(delta, p, NoiseStream::for_trajectory(p.seed, 0, noise_kind_for(kind)),
                                        grid0, [](std::size_t, const WaveFunction&) {});
  if (log.events.size() < jumps) return {false, "only " + std::to_string(log.events.size()) + " jumps"};
  const auto w = log.waiting_times();
  const double tau = ntb_test::moments(std::span(w.data(), jumps)).mean * gamma;

  std::vector<double> d2;
  std::int64_t prev = 0;
  const auto n = static_cast<std::int64_t>(p.n_sites);
  for (std::size_t k = 0; k < jumps; ++k) {
    std::int64_t d = log.events[k].site - prev;
    d = ((d % n) + n + n / 2) % n - n / 2;
    d2.push_back(double(d * d));
    prev = log.events[k].site;
  }
  const double jump2 = ntb_test::moments(d2).mean * gamma * gamma / 4.0;

  ModelParams q = p;
  q.n_sites = 4096;
  q.t_max = 60000.0;
  q.seed = 2025;
  std::vector<double> grid;
  for (int k = 0; k <= 1200000; ++k) grid.push_back(0.05 * k);
  double sum = 0.0;
  std::size_t count = 0;
  jump_event_driven(make_initial(q, {InitialKind::delta_site, 0, 0}), q,
                    NoiseStream::for_trajectory(q.seed, 0, noise_kind_for(kind)), grid,
                    [&](std::size_t i, const WaveFunction& s) {
                      if (grid[i] * gamma < 40.0) return;
                      sum += measure(s).var_x;
                      ++count;
                    });
  const double avg = sum / double(count) * gamma * gamma / 4.0;

  const bool pass = std::abs(tau - 1.0) < 0.01 && std::abs(jump2 - 1.0) < 0.03 &&
                    std::abs(avg - 1.0) < 0.05;
  return {pass, "gamma*M[tau]=" + fmt(tau, 5) + " (1%), gamma^2 M[d^2]/4=" + fmt(jump2, 5) +
                    " (3%), gamma^2 <sigma^2>_t/4=" + fmt(avg, 5) + " (5%)"};
}

Verdict subdiffusion() {
  const bool full = full_scale();
  const std::size_t n = full ? 4000 : 1000;
  const double tol = full ? 0.1 : 0.15;
  const EnsembleSummary& s = preset_summary("fig2", n);
  const double t_end = s.t.back();
  const FitResult f = fit_power_law(s.t, s.mean_x_sq, t_end / 10.0, t_end);
  return {std::abs(f.exponent - 0.5) <= tol,
          "exponent " + fmt(f.exponent) + " +/- " + fmt(f.exponent_stderr) + " over [" +
              fmt(f.window_lo) + ", " + fmt(f.window_hi) + "], expected 0.5 +/- " + fmt(tol) +
              ", " + std::to_string(n) + " trajectories"};
}

std::size_t qsd_trajectories() { return full_scale() ? 10000 : 2000; }

Verdict qsd_width() {
  std::vector<double> g, v;
  bool above = true;
  std::string detail;
  for (double gamma : {8.0, 16.0, 32.0, 64.0}) {
    const EnsembleSummary& s =
        preset_summary("fig3-gamma" + format_double(gamma), qsd_trajectories());
    const double a = asymptotic_variance(s, gamma);
    above = above && a > 4.0 / (gamma * gamma);
    g.push_back(gamma);
    v.push_back(a);
    detail += "sigma2(" + format_double(gamma) + ")=" + fmt(a) + " ";
  }
  const FitResult f = fit_power_law(g, v, 0.0, INFINITY, 2);
  const double kappa = -f.exponent;
  return {kappa >= 1.6 && kappa <= 1.9 && above,
          detail + "kappa=" + fmt(kappa) + " +/- " + fmt(f.exponent_stderr) +
              (above ? ", all above 4/gamma^2" : ", NOT above 4/gamma^2")};
}

double interp_log(const std::vector<double>& x, const std::vector<double>& y, double at) {
  const auto hi = std::upper_bound(x.begin(), x.end(), at);
  if (hi == x.begin()) return y.front();
  if (hi == x.end()) return y.back();
  const std::size_t j = std::size_t(hi - x.begin());
  const double w = std::log(at / x[j - 1]) / std::log(x[j] / x[j - 1]);
  return y[j - 1] + w * (y[j] - y[j - 1]);
}

Verdict wide_open() {
  const EnsembleSummary& wide = preset_summary("fig5", 1000, 40.0);
  std::string detail;
  bool pass = true;

  for (double gamma : {16.0, 32.0, 64.0}) {
    const EnsembleSummary& s =
        preset_summary("fig3-gamma" + format_double(gamma), qsd_trajectories());
    double worst_var = 0.0, worst_pn = 0.0, at_var = 0.0, at_pn = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      const double gt = gamma * s.t[i];
      if (gt < 1.0 || gt > 40.0) continue;
      const double dv = std::abs(s.mean_var[i] / interp_log(wide.t, wide.mean_var, gt) - 1.0);
      const double dp = std::abs(s.mean_pn[i] / interp_log(wide.t, wide.mean_pn, gt) - 1.0);
      if (dv > worst_var) std::tie(worst_var, at_var) = std::pair(dv, gt);
      if (dp > worst_pn) std::tie(worst_pn, at_pn) = std::pair(dp, gt);
    }
    pass = pass && worst_var <= 0.1 && worst_pn <= 0.1;
    detail += "gamma " + format_double(gamma) + ": var " + fmt(worst_var, 3) + " at gamma t " +
              fmt(at_var, 3) + ", P " + fmt(worst_pn, 3) + " at gamma t " + fmt(at_pn, 3) + "; ";
  }

  bool monotone = true;
  for (std::size_t i = 1; i < wide.t.size(); ++i) {
    const double rise = wide.mean_pn[i] - wide.mean_pn[i - 1];
    const double se = std::hypot(wide.stderr_pn[i], wide.stderr_pn[i - 1]);
    if (rise > 3.0 * se + 1e-12) monotone = false;
  }
  const double p_end = wide.mean_pn.back();
  const bool toward_one = p_end < 0.5 * wide.mean_pn.front() && p_end >= 1.0 - 1e-12;
  pass = pass && monotone && toward_one;
  detail += std::string("M[P] ") + (monotone ? "monotone" : "NOT monotone") + ", end " +
            fmt(p_end) + "; ";

  ModelParams p = find_preset("fig5").config.model;
  p.n_sites = 201;
  Stepper st(p);
  const UnravellingKind kind{Unravelling::qsd_wide_open, QsdNoise::complex};
  WaveFunction s = make_initial(p, {InitialKind::gaussian_packet, 25.0, 0});
  NoiseStream path = NoiseStream::for_trajectory(77, 0, noise_kind_for(kind));
  double worst_z = -INFINITY;
  for (int stage = 0; stage < 8; ++stage) {
    const double v0 = measure(s).var_x;
    std::vector<double> dv;
    for (std::uint64_t j = 0; j < 4000; ++j) {
      WaveFunction c = s;
      NoiseStream ns = NoiseStream::for_trajectory(78 + stage, j, noise_kind_for(kind));
      st.qsd_wide_open_step(c, ns, QsdNoise::complex);
      dv.push_back(measure(c).var_x - v0);
    }
    const auto m = ntb_test::moments(dv);
    if (m.se > 0.0) worst_z = std::max(worst_z, m.mean / m.se);
    for (int k = 0; k < 2000; ++k) st.qsd_wide_open_step(s, path, QsdNoise::complex);
  }
  const bool shrink = worst_z <= 3.0;
  pass = pass && shrink;
  detail += "per-step M[d sigma^2] max z " + fmt(worst_z, 3);
  return {pass, detail};
}

Verdict lindblad_properties() {
  std::string detail;
  bool pass = true;

  double stationary = 0.0;
  for (Boundary b : {Boundary::periodic, Boundary::open}) {
    ModelParams p;
    p.gamma = 5.0;
    p.n_sites = 21;
    p.boundary = b;
    const LindbladSolver s(p);
    LindbladState st{DensityMatrix::maximally_mixed(21), 0.0};
    s.evolve(st, 2.0);
    stationary = std::max(
        stationary,
        (st.rho.matrix() - DensityMatrix::maximally_mixed(21).matrix()).cwiseAbs().maxCoeff());
  }
  pass = pass && stationary < 1e-10;
  detail += "stationary dev " + fmt(stationary, 3) + "; ";

  double worst_rate = 0.0;
  for (double gamma : {1.0, 10.0, 40.0}) {
    const DecaySeries d = coherence_decay_series(gamma, 21, 2.0 / gamma, 100, 1e-2 / gamma);
    const CoherenceFit c = coherence_time_estimate(d.t, d.values);
    worst_rate = std::max(worst_rate, std::abs(1.0 / (c.tau * gamma) - 1.0));
  }
  pass = pass && worst_rate < 1e-3;
  detail += "decay rate rel err " + fmt(worst_rate, 3) + "; ";

  const double gamma = 40.0;
  ModelParams p = lindblad_defaults().model;
  p.gamma = gamma;
  const LindbladSolver s(p);
  LindbladState st = lindblad_initial(p, {InitialKind::gaussian_packet, 1.0, 0});
  std::vector<double> red = st.rho.diagonal();
  double t = 0.0, worst_red = 0.0;
  for (double stop : {0.5, 1.0, 2.0, 5.0}) {
    s.evolve(st, stop);
    red = reduced_diffusion_evolve(red, gamma, stop - t, 1e-3, p.boundary);
    t = stop;
    const auto full = st.rho.diagonal();
    const double peak = *std::max_element(full.begin(), full.end());
    for (std::size_t i = 0; i < full.size(); ++i)
      if (full[i] >= 0.01 * peak) worst_red = std::max(worst_red, std::abs(red[i] / full[i] - 1.0));
  }
  pass = pass && worst_red < 0.05;
  detail += "reduced vs full " + fmt(worst_red, 3) + "; ";

  std::vector<double> first;
  for (double g : {20.0, 40.0}) {
    ModelParams q = p;
    q.gamma = g;
    const LindbladSolver sq(q);
    LindbladState sg = lindblad_initial(q, {InitialKind::gaussian_packet, 1.0, 0});
    sq.evolve(sg, 1.0);
    first.push_back(offdiagonal_profile(sg.rho, 1, q.boundary)[1]);
  }
  const double halving = first[0] / first[1] / 2.0;
  pass = pass && std::abs(halving - 1.0) < 0.25;
  detail += "off-diagonal ratio / 2 = " + fmt(halving);
  return {pass, detail};
}

Verdict equivalence() {
  Config cfg = compare_defaults();
  cfg.trajectories = 5000;
  const CompareReport r = compare_unravellings(to_compare_spec(cfg));
  return {r.pass && r.max_corrected_z < 4.0,
          "max |z| " + fmt(r.max_abs_z) + ", corrected " + fmt(r.max_corrected_z) + " over " +
              std::to_string(r.n_tests) + " tests"};
}

Verdict determinism() {
  bool pass = true;
  std::string detail;
  for (const char* u : {"wnp", "qsd", "qsd-wide", "jump", "jump-event"}) {
    Config cfg;
    cfg.model.gamma = 8.0;
    cfg.model.n_sites = 201;
    cfg.model.t_max = 0.5;
    cfg.model.seed = 31;
    cfg.trajectories = 50;
    cfg.unravelling.tag = parse_unravelling(u);
    std::string out[2];
    const std::size_t workers[2] = {1, 3};
    for (int k = 0; k < 2; ++k) {
      cfg.workers = workers[k];
      std::ostringstream os;
      write_summary_csv(os, run_config(cfg), cfg);
      out[k] = os.str();
    }
    const bool same = out[0] == out[1];
    pass = pass && same;
    detail += std::string(u) + (same ? " identical " : " DIFFERENT ");
  }
  return {pass, detail + "(1 vs 3 workers)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"free-spreading", free_spreading},
      {"lindblad", lindblad_properties},
      {"determinism", determinism},
      {"jump-statistics", jump_statistics},
      {"equivalence", equivalence},
      {"qsd-width", qsd_width},
      {"wide-open", wide_open},
      {"subdiffusion", subdiffusion},
      {"diffusion", diffusion},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  std::printf("acceptance scale: %s\n", full_scale() ? "full" : "desk");
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s [%.0f s]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(),
                secs);
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
