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
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "noisytb/lattice.hpp"
#include "noisytb/observables.hpp"
#include "noisytb/unravellings.hpp"

namespace ntb {

/// Worker-count override read by resolve_workers.
inline constexpr const char* kWorkersEnv = "NTB_WORKERS";
/// Trajectories per work unit. Partial sums are merged in chunk order.
inline constexpr std::size_t kChunkSize = 16;

struct RunSpec {
  ModelParams params;
  UnravellingKind unravelling;
  InitialState initial;
  std::size_t n_trajectories = 1;
  GridSpec grid;
  std::string output_path;
  bool persist_trajectories = false;
  /// 0 selects $NTB_WORKERS, then the hardware concurrency.
  std::size_t workers = 0;
  std::size_t memory_budget_bytes = std::size_t{4} << 30;

  void validate() const;
};

/// 0 -> $NTB_WORKERS if set, else std::thread::hardware_concurrency().
std::size_t resolve_workers(std::size_t requested);

/// Rough peak memory of a run: state and scratch per worker plus persisted
/// records.
std::size_t estimate_memory(const RunSpec& spec, std::size_t workers);

/// Observes a single trajectory on `grid`. Time-stepped unravellings require
/// every grid time to be a whole number of steps.
TrajectoryRecord run_trajectory(const RunSpec& spec, std::uint64_t trajectory,
                                const std::vector<double>& grid, JumpLog* log = nullptr);

/// Same as above, handing every grid state to `observe` instead of measuring.
void run_trajectory(const RunSpec& spec, std::uint64_t trajectory,
                    const std::vector<double>& grid, const GridObserver& observe,
                    JumpLog* log = nullptr);

struct EnsembleResult {
  EnsembleSummary summary;
  /// Filled only when spec.persist_trajectories is set, indexed by trajectory.
  std::vector<TrajectoryRecord> records;
  std::size_t workers = 1;
};

/// Called after each finished chunk with (trajectories done, total).
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

/// Runs spec.n_trajectories independent trajectories. The summary depends on
/// (seed, spec) only, not on the worker count. A failing trajectory aborts
/// the run with SimulationAbort naming its index and seeds.
EnsembleResult run_ensemble(const RunSpec& spec, const ProgressFn& progress = {});

struct CompareSpec {
  /// Must be periodic with at most 15 sites.
  ModelParams params;
  InitialState initial{InitialKind::gaussian_packet, 1.0, 0};
  std::vector<double> checkpoints{0.5, 1.0, 2.0};
  std::size_t n_trajectories = 5000;
  std::vector<UnravellingKind> kinds{{Unravelling::wnp, QsdNoise::complex},
                                     {Unravelling::qsd, QsdNoise::complex},
                                     {Unravelling::jump_event_driven, QsdNoise::complex}};
  /// gamma used for the Lindblad reference; defaults to params.gamma.
  std::optional<double> oracle_gamma;
  double lindblad_dt = 1e-3;
  /// Deterministic discretization allowance added in quadrature to the
  /// standard error of every element.
  double abs_tolerance = 2e-4;
  double z_limit = 4.0;
  std::size_t workers = 0;

  void validate() const;
};

struct ElementScore {
  Unravelling unravelling = Unravelling::wnp;
  double t = 0.0;
  std::size_t row = 0;
  std::size_t col = 0;
  /// 0 real part, 1 imaginary part.
  int part = 0;
  double mean = 0.0;
  double oracle = 0.0;
  double stderr_mean = 0.0;
  double z = 0.0;
  double z_corrected = 0.0;
};

struct CompareReport {
  std::vector<ElementScore> elements;
  std::size_t n_tests = 0;
  double max_abs_z = 0.0;
  double max_corrected_z = 0.0;
  bool pass = false;
};

/// Two-sided Bonferroni correction: the |z| whose tail probability is
/// min(1, m P(|Z| > |z|)).
double bonferroni_z(double z, std::size_t m);

/// Ensemble-averaged projectors M[|psi><psi|] of each unravelling against the
/// directly integrated Lindblad density matrix at every checkpoint.
CompareReport compare_unravellings(const CompareSpec& spec);

}  // namespace ntb
