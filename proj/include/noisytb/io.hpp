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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noisytb/ensemble.hpp"
#include "noisytb/lindblad.hpp"
#include "noisytb/observables.hpp"

namespace ntb {

inline constexpr int kCsvSchemaVersion = 1;
std::string_view code_version();

/// Everything a config file can set. The run, compare and lindblad commands
/// each read the parts they need.
struct Config {
  ModelParams model;
  InitialState initial;

  UnravellingKind unravelling{Unravelling::jump_event_driven, QsdNoise::complex};
  std::size_t trajectories = 1000;
  std::size_t workers = 0;
  std::string output;
  bool persist_trajectories = false;
  std::size_t memory_budget_mb = 4096;
  GridSpec grid;

  std::vector<double> checkpoints{0.5, 1.0, 2.0};
  std::vector<UnravellingKind> compare_kinds{
      {Unravelling::wnp, QsdNoise::complex},
      {Unravelling::qsd, QsdNoise::complex},
      {Unravelling::jump_event_driven, QsdNoise::complex}};
  std::optional<double> oracle_gamma;
  double lindblad_dt = kDefaultLindbladDt;
  double abs_tolerance = 2e-4;
  double z_limit = 4.0;
  std::size_t lindblad_samples = 100;
};

/// Applies `key = value` lines grouped under [model], [initial], [run],
/// [grid], [compare] and [lindblad] on top of `base`. Unknown sections or
/// keys are rejected with the line number and the closest known spelling.
Config parse_config(std::string_view text, Config base = {},
                    std::string_view source = "<config>");
Config load_config(const std::string& path, Config base = {});

/// Sets one `section.key` (or bare key when unambiguous) from a string.
void apply_setting(Config& cfg, std::string_view key, std::string_view value);

/// Every accepted `section.key`.
std::vector<std::string> config_keys();

/// Closest entry of `candidates` within edit distance 2, if any.
std::optional<std::string> suggest(std::string_view word,
                                   const std::vector<std::string>& candidates);

RunSpec to_run_spec(const Config& cfg);
CompareSpec to_compare_spec(const Config& cfg);

struct Preset {
  std::string name;
  std::string description;
  Config config;
};

/// Figure presets (fig1-gamma5 ... fig5) plus defaults for compare and lindblad.
const std::vector<Preset>& presets();
const Preset& find_preset(std::string_view name);

/// Defaults for the compare command: N = 11 periodic, gamma = 4.
Config compare_defaults();
/// Defaults for the lindblad command: N = 41 periodic, gamma = 40.
Config lindblad_defaults();

/// `section.key = value` lines describing the full configuration. CSV preambles
/// omit run.output and run.workers so output bytes do not depend on them.
std::vector<std::pair<std::string, std::string>> spec_echo(const Config& cfg);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s, std::string_view what);

inline constexpr std::string_view kSummaryHeader =
    "t,mean_x2,mean_x_sq,mean_var,mean_pn,stderr_mean_x2,stderr_mean_x_sq,stderr_mean_var,"
    "stderr_mean_pn";

struct SummaryFile {
  EnsembleSummary summary;
  /// Preamble entries `key = value` (spec echo).
  std::map<std::string, std::string> meta;
  /// Preamble lines written by the fit command.
  std::vector<std::string> fits;
};

void write_summary_csv(std::ostream& os, const EnsembleSummary& s, const Config& cfg);
void write_summary_csv(const std::string& path, const EnsembleSummary& s, const Config& cfg);
/// Throws ConfigError on any schema violation.
SummaryFile read_summary_csv(std::istream& is, std::string_view source = "<csv>");
SummaryFile read_summary_csv(const std::string& path);
/// Appends one `# fit ...` line to an existing summary file.
void append_fit_line(const std::string& path, const std::string& line);

inline constexpr std::string_view kCompareHeader =
    "unravelling,t,row,col,part,mean,oracle,stderr,z,z_corrected";

void write_compare_csv(std::ostream& os, const CompareReport& r, const Config& cfg);
void write_compare_csv(const std::string& path, const CompareReport& r, const Config& cfg);

inline constexpr std::string_view kLindbladHeader = "t,trace,mean_x,mean_x2,purity,coherence";

void write_lindblad_csv(std::ostream& os, const std::vector<LindbladObservation>& rows,
                        const Config& cfg);
void write_lindblad_csv(const std::string& path, const std::vector<LindbladObservation>& rows,
                        const Config& cfg);

}  // namespace ntb
