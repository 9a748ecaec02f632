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

#include <optional>
#include <string>
#include <vector>

#include "noisytb/observables.hpp"

namespace ntb {

/// diffusion | linear | power-law | subdiffusion | asymptotic-variance | kappa
enum class FitKind { diffusion, linear, power_law, subdiffusion, asymptotic_variance, kappa };

FitKind parse_fit_kind(std::string_view s);
std::string_view to_string(FitKind k);

struct FitRequest {
  std::vector<std::string> files;
  FitKind kind = FitKind::diffusion;
  /// Summary column used by linear and power-law fits.
  std::string column = "mean_x2";
  std::optional<double> lo;
  std::optional<double> hi;
  /// Append the machine-readable line to every input file.
  bool append = true;
};

struct FitOutcome {
  FitResult fit;
  /// Scalar result: D, exponent, asymptotic variance or kappa.
  double value = 0.0;
  double value_stderr = 0.0;
  /// `kind=... value=... stderr=... lo=... hi=... n=...`
  std::string machine_line;
};

/// Column of a summary by CSV name (t, mean_x2, mean_x_sq, mean_var, mean_pn, stderr_*).
const std::vector<double>& summary_column(const EnsembleSummary& s, std::string_view name);

/// Default windows: diffusion gamma t in [10, end], power-law fits the last
/// decade, kappa fits every file.
FitOutcome run_fit(const FitRequest& req);

}  // namespace ntb
