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
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "noisytb/analysis.hpp"
#include "noisytb/ensemble.hpp"
#include "noisytb/error.hpp"
#include "noisytb/io.hpp"
#include "noisytb/kernels.hpp"
#include "noisytb/lindblad.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitEquivalence = 4;

struct Overrides {
  std::string config;
  std::string preset;
  std::optional<double> gamma, dt, t_max, variance;
  std::optional<std::size_t> sites, trajectories, workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> center;
  std::string unravelling, noise, out, initial, boundary;
  std::vector<std::string> settings;
};

void add_model_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "Config file ([model], [initial], [run], ...)");
  app->add_option("--preset", o.preset, "Start from a named preset (see 'presets list')");
  app->add_option("--gamma", o.gamma, "Noise strength gamma");
  app->add_option("--sites", o.sites, "Lattice size N");
  app->add_option("--dt", o.dt, "Time step");
  app->add_option("--t-max", o.t_max, "End time");
  app->add_option("--trajectories", o.trajectories, "Number of trajectories");
  app->add_option("--seed", o.seed, "Base seed");
  app->add_option("--workers", o.workers, "Worker threads (default: $NTB_WORKERS or all cores)");
  app->add_option("--boundary", o.boundary, "open|periodic");
  app->add_option("--initial", o.initial, "gaussian|delta|uniform");
  app->add_option("--variance", o.variance, "Initial packet variance");
  app->add_option("--center", o.center, "Initial packet centre");
  app->add_option("--out", o.out, "Output CSV path");
  app->add_option("--set", o.settings, "Extra setting section.key=value (repeatable)");
}

ntb::Config resolve(const Overrides& o, ntb::Config base) {
  ntb::Config c = o.preset.empty() ? std::move(base) : ntb::find_preset(o.preset).config;
  if (!o.config.empty()) c = ntb::load_config(o.config, std::move(c));
  if (o.gamma) c.model.gamma = *o.gamma;
  if (o.sites) c.model.n_sites = *o.sites;
  if (o.dt) c.model.dt = *o.dt;
  if (o.t_max) c.model.t_max = *o.t_max;
  if (o.trajectories) c.trajectories = *o.trajectories;
  if (o.seed) c.model.seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  if (!o.boundary.empty()) c.model.boundary = ntb::parse_boundary(o.boundary);
  if (!o.initial.empty()) c.initial.kind = ntb::parse_initial_kind(o.initial);
  if (o.variance) c.initial.variance = *o.variance;
  if (o.center) c.initial.center = *o.center;
  if (!o.unravelling.empty()) c.unravelling.tag = ntb::parse_unravelling(o.unravelling);
  if (!o.noise.empty()) c.unravelling.noise = ntb::parse_qsd_noise(o.noise);
  if (!o.out.empty()) c.output = o.out;
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ntb::ConfigError("--set expects section.key=value");
    ntb::apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  return c;
}

int cmd_run(const Overrides& o, bool quiet) {
  const ntb::Config cfg = resolve(o, {});
  const ntb::RunSpec spec = ntb::to_run_spec(cfg);
  ntb::ProgressFn progress;
  if (!quiet)
    progress = [](std::size_t done, std::size_t total) {
      std::fprintf(stderr, "\r%zu / %zu trajectories", done, total);
      if (done == total) std::fputc('\n', stderr);
    };
  const ntb::EnsembleResult r = ntb::run_ensemble(spec, progress);
  if (cfg.output.empty() || cfg.output == "-") {
    ntb::write_summary_csv(std::cout, r.summary, cfg);
  } else {
    ntb::write_summary_csv(cfg.output, r.summary, cfg);
    if (!quiet) std::fprintf(stderr, "wrote %s\n", cfg.output.c_str());
  }
  return kExitOk;
}

int cmd_compare(const Overrides& o, std::optional<double> oracle_gamma,
                const std::string& checkpoints, const std::string& kinds) {
  ntb::Config cfg = resolve(o, ntb::compare_defaults());
  if (oracle_gamma) cfg.oracle_gamma = oracle_gamma;
  if (!checkpoints.empty()) ntb::apply_setting(cfg, "compare.checkpoints", checkpoints);
  if (!kinds.empty()) ntb::apply_setting(cfg, "compare.unravellings", kinds);
  const ntb::CompareReport r = ntb::compare_unravellings(ntb::to_compare_spec(cfg));
  if (!cfg.output.empty() && cfg.output != "-") ntb::write_compare_csv(cfg.output, r, cfg);
  std::printf("%s max_abs_z=%s max_corrected_z=%s tests=%zu\n", r.pass ? "PASS" : "FAIL",
              ntb::format_double(r.max_abs_z).c_str(),
              ntb::format_double(r.max_corrected_z).c_str(), r.n_tests);
  return r.pass ? kExitOk : kExitEquivalence;
}

int cmd_lindblad(const Overrides& o) {
  const ntb::Config cfg = resolve(o, ntb::lindblad_defaults());
  const ntb::LindbladSolver solver(cfg.model, cfg.lindblad_dt);
  ntb::LindbladState s = ntb::lindblad_initial(cfg.model, cfg.initial);
  const auto total = static_cast<std::size_t>(std::llround(cfg.model.t_max / cfg.lindblad_dt));
  const std::size_t every = std::max<std::size_t>(1, total / std::max<std::size_t>(1, cfg.lindblad_samples));
  std::vector<ntb::LindbladObservation> rows;
  solver.evolve(
      s, cfg.model.t_max,
      [&](const ntb::LindbladState& st) {
        rows.push_back(ntb::observe_lindblad(st, cfg.model.boundary));
      },
      every);
  if (cfg.output.empty() || cfg.output == "-") {
    ntb::write_lindblad_csv(std::cout, rows, cfg);
  } else {
    ntb::write_lindblad_csv(cfg.output, rows, cfg);
  }
  return kExitOk;
}

int cmd_fit(ntb::FitRequest req, const std::string& kind, const std::vector<double>& window) {
  req.kind = ntb::parse_fit_kind(kind);
  if (!window.empty()) {
    if (window.size() != 2) throw ntb::ConfigError("--window expects LO,HI");
    req.lo = window[0];
    req.hi = window[1];
  }
  const ntb::FitOutcome r = ntb::run_fit(req);
  std::printf("%s = %s +/- %s over [%s, %s] (%zu points)\n", std::string(kind).c_str(),
              ntb::format_double(r.value).c_str(), ntb::format_double(r.value_stderr).c_str(),
              ntb::format_double(r.fit.window_lo).c_str(),
              ntb::format_double(r.fit.window_hi).c_str(), r.fit.n_points);
  std::printf("fit %s\n", r.machine_line.c_str());
  return kExitOk;
}

int cmd_presets_list() {
  for (const auto& p : ntb::presets()) std::printf("%-18s %s\n", p.name.c_str(), p.description.c_str());
  return kExitOk;
}

int cmd_presets_show(const std::string& name) {
  const auto& p = ntb::find_preset(name);
  for (const auto& [k, v] : ntb::spec_echo(p.config)) std::printf("%s = %s\n", k.c_str(), v.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy tight-binding chain: stochastic unravellings and master equation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ntb::code_version()));

  Overrides run_o;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run a trajectory ensemble and write a summary CSV");
  add_model_flags(run, run_o);
  run->add_option("--unravelling", run_o.unravelling, "wnp|qsd|qsd-wide|jump|jump-event");
  run->add_option("--noise", run_o.noise, "complex|real (state diffusion only)");
  run->add_flag("--quiet,-q", quiet, "No progress output");

  Overrides cmp_o;
  std::optional<double> oracle_gamma;
  std::string checkpoints, kinds;
  auto* compare =
      app.add_subcommand("compare", "Compare unravellings with direct master-equation integration");
  add_model_flags(compare, cmp_o);
  compare->add_option("--noise", cmp_o.noise, "complex|real");
  compare->add_option("--oracle-gamma", oracle_gamma, "gamma used for the reference integration");
  compare->add_option("--checkpoints", checkpoints, "Comma-separated comparison times");
  compare->add_option("--unravellings", kinds, "Comma-separated list, e.g. wnp,qsd:real,jump-event");

  ntb::FitRequest fit_req;
  std::string fit_kind = "diffusion";
  std::vector<double> window;
  bool no_append = false;
  auto* fit = app.add_subcommand("fit", "Fit a summary CSV (diffusion constant, exponents, ...)");
  fit->add_option("files", fit_req.files, "Summary CSV file(s)")->required();
  fit->add_option("--kind", fit_kind,
                  "diffusion|linear|power-law|subdiffusion|asymptotic-variance|kappa");
  fit->add_option("--column", fit_req.column, "Column for linear and power-law fits");
  fit->add_option("--window", window, "Fit window LO,HI")->delimiter(',')->expected(2);
  fit->add_flag("--no-append", no_append, "Do not append the result to the CSV");

  Overrides lb_o;
  auto* lindblad = app.add_subcommand("lindblad", "Integrate the master equation directly");
  add_model_flags(lindblad, lb_o);

  auto* presets = app.add_subcommand("presets", "Named figure presets");
  presets->require_subcommand(1);
  auto* presets_list = presets->add_subcommand("list", "List presets");
  std::string show_name;
  auto* presets_show = presets->add_subcommand("show", "Print the settings of a preset");
  presets_show->add_option("name", show_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_o, quiet);
    if (*compare) return cmd_compare(cmp_o, oracle_gamma, checkpoints, kinds);
    if (*fit) {
      fit_req.append = !no_append;
      return cmd_fit(fit_req, fit_kind, window);
    }
    if (*lindblad) return cmd_lindblad(lb_o);
    if (*presets_list) return cmd_presets_list();
    if (*presets_show) return cmd_presets_show(show_name);
  } catch (const ntb::SimulationAbort& e) {
    std::fprintf(stderr, "error: %s\nreplay: trajectory %llu, base seed %llu, trajectory seed %llu\n",
                 e.what(), static_cast<unsigned long long>(e.trajectory()),
                 static_cast<unsigned long long>(e.base_seed()),
                 static_cast<unsigned long long>(e.trajectory_seed()));
    return kExitNumerical;
  } catch (const ntb::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ntb::FitError& e) {
    std::fprintf(stderr, "fit error: %s\n", e.what());
    return kExitConfig;
  } catch (const ntb::RangeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const ntb::Error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
