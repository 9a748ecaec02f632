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

#include "noisytb/analysis.hpp"

#include <cmath>
#include <string>

#include "noisytb/error.hpp"
#include "noisytb/io.hpp"

namespace ntb {

FitKind parse_fit_kind(std::string_view s) {
  for (auto k : {FitKind::diffusion, FitKind::linear, FitKind::power_law, FitKind::subdiffusion,
                 FitKind::asymptotic_variance, FitKind::kappa})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown fit kind '" + std::string(s) +
                    "' (expected diffusion|linear|power-law|subdiffusion|asymptotic-variance|"
                    "kappa)");
}

std::string_view to_string(FitKind k) {
  switch (k) {
    case FitKind::diffusion: return "diffusion";
    case FitKind::linear: return "linear";
    case FitKind::power_law: return "power-law";
    case FitKind::subdiffusion: return "subdiffusion";
    case FitKind::asymptotic_variance: return "asymptotic-variance";
    case FitKind::kappa: return "kappa";
  }
  return "?";
}

const std::vector<double>& summary_column(const EnsembleSummary& s, std::string_view name) {
  if (name == "t") return s.t;
  if (name == "mean_x2") return s.mean_x2;
  if (name == "mean_x_sq") return s.mean_x_sq;
  if (name == "mean_var") return s.mean_var;
  if (name == "mean_pn") return s.mean_pn;
  if (name == "stderr_mean_x2") return s.stderr_x2;
  if (name == "stderr_mean_x_sq") return s.stderr_x_sq;
  if (name == "stderr_mean_var") return s.stderr_var;
  if (name == "stderr_mean_pn") return s.stderr_pn;
  throw ConfigError("unknown column '" + std::string(name) + "'");
}

namespace {

std::string line_for(FitKind k, double value, double err, const FitResult& f) {
  return "kind=" + std::string(to_string(k)) + " value=" + format_double(value) +
         " stderr=" + format_double(err) + " lo=" + format_double(f.window_lo) +
         " hi=" + format_double(f.window_hi) + " n=" + std::to_string(f.n_points) +
         " residual=" + format_double(f.residual_norm);
}

}  // namespace

FitOutcome run_fit(const FitRequest& req) {
  if (req.files.empty()) throw ConfigError("fit needs at least one CSV file");
  if (req.kind != FitKind::kappa && req.files.size() != 1)
    throw ConfigError("fit kind '" + std::string(to_string(req.kind)) +
                      "' takes exactly one CSV file");
  FitOutcome out;

  if (req.kind == FitKind::kappa) {
    if (req.files.size() < 2) throw ConfigError("kappa fit needs at least two CSV files");
    std::vector<double> g, v;
    for (const auto& path : req.files) {
      const SummaryFile f = read_summary_csv(path);
      g.push_back(f.summary.gamma);
      v.push_back(asymptotic_variance(f.summary, f.summary.gamma));
    }
    out.fit = fit_power_law(g, v, req.lo.value_or(0.0), req.hi.value_or(INFINITY), 2);
    out.value = -out.fit.exponent;
    out.value_stderr = out.fit.exponent_stderr;
  } else {
    const SummaryFile f = read_summary_csv(req.files.front());
    const EnsembleSummary& s = f.summary;
    const double t_end = s.t.back();
    switch (req.kind) {
      case FitKind::diffusion: {
        const double lo = req.lo.value_or(s.gamma > 0.0 ? 10.0 / s.gamma : s.t.front());
        out.fit = fit_diffusion(s, lo, req.hi.value_or(t_end));
        out.value = out.fit.slope;
        out.value_stderr = out.fit.slope_stderr;
        break;
      }
      case FitKind::linear:
        out.fit = fit_linear(s.t, summary_column(s, req.column), req.lo.value_or(s.t.front()),
                             req.hi.value_or(t_end));
        out.value = out.fit.slope;
        out.value_stderr = out.fit.slope_stderr;
        break;
      case FitKind::power_law:
      case FitKind::subdiffusion: {
        const std::string col = req.kind == FitKind::subdiffusion ? "mean_x_sq" : req.column;
        out.fit = fit_power_law(s.t, summary_column(s, col), req.lo.value_or(t_end / 10.0),
                                req.hi.value_or(t_end));
        out.value = out.fit.exponent;
        out.value_stderr = out.fit.exponent_stderr;
        break;
      }
      case FitKind::asymptotic_variance:
        out.value = asymptotic_variance(s, s.gamma);
        out.fit.window_lo = 40.0 / s.gamma;
        out.fit.window_hi = t_end;
        for (double t : s.t) out.fit.n_points += t >= out.fit.window_lo ? 1 : 0;
        break;
      case FitKind::kappa:
        break;
    }
  }
  out.machine_line = line_for(req.kind, out.value, out.value_stderr, out.fit);
  if (req.append)
    for (const auto& path : req.files) append_fit_line(path, out.machine_line);
  return out;
}

}  // namespace ntb
