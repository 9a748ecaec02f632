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

#include "noisytb/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "noisytb/error.hpp"
#include "noisytb/lindblad.hpp"
#include "noisytb/noise.hpp"

namespace ntb {

namespace {

bool is_event_driven(const UnravellingKind& k) {
  return k.tag == Unravelling::jump_event_driven;
}

/// Runs `n_items` work items in fixed chunks on `workers` threads. Each chunk
/// gets its own Partial from make(), filled by run(partial, item); partials are
/// folded into the result in chunk order. The first failing chunk (lowest
/// index) decides the exception that is rethrown.
template <class Partial, class Make, class Run, class Fold>
void parallel_chunks(std::size_t n_items, std::size_t workers, Make make, Run run, Fold fold,
                     const ProgressFn& progress) {
  const std::size_t n_chunks = (n_items + kChunkSize - 1) / kChunkSize;
  std::vector<std::optional<Partial>> partials(n_chunks);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t done = 0;
  std::size_t failed_chunk = n_chunks;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        Partial p = make();
        const std::size_t end = std::min(n_items, (c + 1) * kChunkSize);
        for (std::size_t i = c * kChunkSize; i < end; ++i) run(p, i);
        std::lock_guard lock(mu);
        partials[c].emplace(std::move(p));
        done += end - c * kChunkSize;
        if (progress) progress(done, n_items);
      } catch (...) {
        std::lock_guard lock(mu);
        if (c < failed_chunk) {
          failed_chunk = c;
          error = std::current_exception();
        }
        failed.store(true);
        return;
      }
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, n_chunks));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  for (auto& p : partials) fold(*p);
}

std::vector<long long> grid_steps(const std::vector<double>& grid, double dt) {
  std::vector<long long> steps(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    steps[i] = std::llround(grid[i] / dt);
    if (std::abs(double(steps[i]) * dt - grid[i]) > 1e-9 * std::max(1.0, grid[i]))
      throw ConfigError("grid time " + std::to_string(grid[i]) +
                        " is not a whole number of steps of dt = " + std::to_string(dt));
    if (i > 0 && steps[i] < steps[i - 1]) throw ConfigError("grid times must be ascending");
  }
  return steps;
}

}  // namespace

void RunSpec::validate() const {
  params.validate();
  if (n_trajectories < 1) throw ConfigError("n_trajectories must be >= 1");
  if (unravelling.tag == Unravelling::jump && params.gamma * params.dt > kMaxJumpProbability)
    throw ConfigError("time-stepped jump unravelling needs gamma dt <= 0.01 (got " +
                      std::to_string(params.gamma * params.dt) + ")");
  if (initial.variance < 0.0) throw ConfigError("initial variance must be >= 0");
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ConfigError(std::string(kWorkersEnv) + " must be a positive integer (got '" + env +
                        "')");
    return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t estimate_memory(const RunSpec& spec, std::size_t workers) {
  const std::size_t n = spec.params.n_sites;
  const std::size_t per_state = 2 * (n + 2 * WaveFunction::kPad) * sizeof(double);
  const std::size_t per_worker = 3 * per_state + 4 * (n + 2) * sizeof(double);
  std::size_t total = workers * per_worker;
  if (spec.persist_trajectories) {
    const std::size_t points = make_grid(spec.grid, spec.params.gamma, spec.params.t_max,
                                         spec.params.dt)
                                   .size();
    total += spec.n_trajectories * 5 * points * sizeof(double);
  }
  return total;
}

void run_trajectory(const RunSpec& spec, std::uint64_t trajectory,
                    const std::vector<double>& grid, const GridObserver& observe,
                    JumpLog* log) {
  const ModelParams& p = spec.params;
  NoiseStream stream =
      NoiseStream::for_trajectory(p.seed, trajectory, noise_kind_for(spec.unravelling));
  WaveFunction psi = make_initial(p, spec.initial);

  if (is_event_driven(spec.unravelling)) {
    try {
      JumpLog l = jump_event_driven(psi, p, stream, grid, observe);
      if (log != nullptr) *log = std::move(l);
    } catch (const SimulationAbort&) {
      throw;
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw SimulationAbort(std::string(e.what()) + " in trajectory " +
                                std::to_string(trajectory),
                            trajectory, p.seed, stream.seed());
    }
    return;
  }

  const std::vector<long long> steps = grid_steps(grid, p.dt);
  Stepper stepper(p);
  std::size_t gi = 0;
  while (gi < steps.size() && steps[gi] == 0) observe(gi++, psi);
  const long long last = steps.empty() ? 0 : steps.back();
  long long s = 1;
  try {
    for (; s <= last; ++s) {
      stepper.step(psi, stream, spec.unravelling, log);
      while (gi < steps.size() && steps[gi] == s) observe(gi++, psi);
    }
  } catch (const SimulationAbort&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw SimulationAbort(std::string(e.what()) + " in trajectory " + std::to_string(trajectory) +
                              " at step " + std::to_string(s) + " (t = " +
                              std::to_string(double(s) * p.dt) + ")",
                          trajectory, p.seed, stream.seed());
  }
}

TrajectoryRecord run_trajectory(const RunSpec& spec, std::uint64_t trajectory,
                                const std::vector<double>& grid, JumpLog* log) {
  TrajectoryRecord rec;
  rec.grid = grid;
  rec.resize(grid.size());
  run_trajectory(
      spec, trajectory, grid,
      [&](std::size_t i, const WaveFunction& psi) { rec.store(i, measure(psi)); }, log);
  return rec;
}

EnsembleResult run_ensemble(const RunSpec& spec, const ProgressFn& progress) {
  spec.validate();
  const std::size_t workers = resolve_workers(spec.workers);
  const std::size_t need = estimate_memory(spec, workers);
  if (need > spec.memory_budget_bytes)
    throw ConfigError("run needs about " + std::to_string(need >> 20) +
                      " MiB, above the memory budget of " +
                      std::to_string(spec.memory_budget_bytes >> 20) + " MiB");
  // Validate the initial state once up front so configuration problems are
  // reported as such rather than as a trajectory failure.
  (void)make_initial(spec.params, spec.initial);

  const std::vector<double> grid =
      make_grid(spec.grid, spec.params.gamma, spec.params.t_max, spec.params.dt);
  if (!is_event_driven(spec.unravelling)) (void)grid_steps(grid, spec.params.dt);

  EnsembleResult result;
  result.workers = workers;
  if (spec.persist_trajectories) result.records.resize(spec.n_trajectories);
  EnsembleAccumulator total(grid);
  parallel_chunks<EnsembleAccumulator>(
      spec.n_trajectories, workers, [&] { return EnsembleAccumulator(grid); },
      [&](EnsembleAccumulator& acc, std::size_t k) {
        TrajectoryRecord rec = run_trajectory(spec, k, grid);
        acc.add(rec);
        if (spec.persist_trajectories) result.records[k] = std::move(rec);
      },
      [&](const EnsembleAccumulator& acc) { total.merge(acc); }, progress);
  result.summary = total.summary(spec.params.gamma);
  return result;
}

void CompareSpec::validate() const {
  params.validate();
  if (params.boundary != Boundary::periodic)
    throw ConfigError("unravelling comparison needs a periodic lattice");
  if (params.n_sites > 15)
    throw ConfigError("unravelling comparison supports at most 15 sites");
  if (checkpoints.empty()) throw ConfigError("comparison needs at least one checkpoint");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (!(checkpoints[i] > 0.0)) throw ConfigError("checkpoints must be > 0");
    if (i > 0 && !(checkpoints[i] > checkpoints[i - 1]))
      throw ConfigError("checkpoints must be strictly ascending");
  }
  if (n_trajectories < 2) throw ConfigError("comparison needs at least 2 trajectories");
  if (kinds.empty()) throw ConfigError("comparison needs at least one unravelling");
  if (!(abs_tolerance >= 0.0)) throw ConfigError("abs_tolerance must be >= 0");
}

double bonferroni_z(double z, std::size_t m) {
  const double a = std::abs(z);
  const double p = std::erfc(a / std::sqrt(2.0));
  if (p == 0.0) return a;
  const double pc = p * double(std::max<std::size_t>(m, 1));
  if (pc >= 1.0) return 0.0;
  double lo = 0.0, hi = a;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > pc) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

/// Per-element running statistics of |psi><psi| at every checkpoint.
struct ProjectorStats {
  std::size_t n = 0;
  std::size_t n_checkpoints = 0;
  std::vector<RunningStats> re, im;

  ProjectorStats(std::size_t sites, std::size_t checkpoints)
      : n(sites),
        n_checkpoints(checkpoints),
        re(sites * sites * checkpoints),
        im(sites * sites * checkpoints) {}

  void add(std::size_t c, const WaveFunction& psi) {
    for (std::size_t r = 0; r < n; ++r) {
      const cplx a = psi[r];
      for (std::size_t col = r; col < n; ++col) {
        const cplx v = a * std::conj(psi[col]);
        const std::size_t idx = (c * n + r) * n + col;
        re[idx].add(v.real());
        im[idx].add(v.imag());
      }
    }
  }
  void merge(const ProjectorStats& o) {
    for (std::size_t i = 0; i < re.size(); ++i) {
      re[i].merge(o.re[i]);
      im[i].merge(o.im[i]);
    }
  }
};

}  // namespace

CompareReport compare_unravellings(const CompareSpec& spec) {
  spec.validate();
  const std::size_t n = spec.params.n_sites;
  const std::size_t nc = spec.checkpoints.size();
  const std::size_t workers = resolve_workers(spec.workers);

  ModelParams oracle_params = spec.params;
  oracle_params.gamma = spec.oracle_gamma.value_or(spec.params.gamma);
  const LindbladSolver solver(oracle_params, spec.lindblad_dt);
  LindbladState state = lindblad_initial(oracle_params, spec.initial);
  std::vector<DensityMatrix> oracle;
  for (double t : spec.checkpoints) {
    solver.evolve(state, t);
    oracle.push_back(state.rho);
  }

  CompareReport report;
  const std::size_t per_checkpoint = n + n * (n - 1);
  report.n_tests = spec.kinds.size() * nc * per_checkpoint;

  for (const auto& kind : spec.kinds) {
    RunSpec rs;
    rs.params = spec.params;
    rs.params.t_max = spec.checkpoints.back();
    rs.unravelling = kind;
    rs.initial = spec.initial;
    rs.n_trajectories = spec.n_trajectories;
    rs.validate();
    (void)make_initial(rs.params, rs.initial);

    ProjectorStats total(n, nc);
    parallel_chunks<ProjectorStats>(
        spec.n_trajectories, workers, [&] { return ProjectorStats(n, nc); },
        [&](ProjectorStats& st, std::size_t k) {
          run_trajectory(rs, k, spec.checkpoints,
                         [&](std::size_t c, const WaveFunction& psi) { st.add(c, psi); });
        },
        [&](const ProjectorStats& st) { total.merge(st); }, {});

    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t col = r; col < n; ++col) {
          const std::size_t idx = (c * n + r) * n + col;
          const cplx o = oracle[c](r, col);
          for (int part = 0; part < (r == col ? 1 : 2); ++part) {
            const RunningStats& s = part == 0 ? total.re[idx] : total.im[idx];
            ElementScore e;
            e.unravelling = kind.tag;
            e.t = spec.checkpoints[c];
            e.row = r;
            e.col = col;
            e.part = part;
            e.mean = s.mean;
            e.oracle = part == 0 ? o.real() : o.imag();
            e.stderr_mean = s.stderr_mean();
            const double scale = std::hypot(e.stderr_mean, spec.abs_tolerance);
            const double diff = e.mean - e.oracle;
            e.z = scale > 0.0 ? diff / scale : (diff == 0.0 ? 0.0 : INFINITY);
            e.z_corrected = bonferroni_z(e.z, report.n_tests);
            report.max_abs_z = std::max(report.max_abs_z, std::abs(e.z));
            report.max_corrected_z = std::max(report.max_corrected_z, e.z_corrected);
            report.elements.push_back(e);
          }
        }
      }
    }
  }
  report.pass = report.max_corrected_z < spec.z_limit;
  return report;
}

}  // namespace ntb
