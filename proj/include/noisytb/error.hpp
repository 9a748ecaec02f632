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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ntb {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (parameters, presets, config files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Weight reached an open lattice edge, or a light cone left the lattice.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// Pre-renormalization norm drifted too far: the time step is too large.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the validated accuracy window of a numerical routine.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Density-matrix integration lost positivity, trace or Hermiticity.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Curve fit could not be performed on the given data.
class FitError : public Error {
 public:
  using Error::Error;
};

/// A trajectory inside an ensemble failed. Carries what is needed to replay it.
class SimulationAbort : public Error {
 public:
  SimulationAbort(const std::string& what, std::uint64_t trajectory,
                  std::uint64_t base_seed, std::uint64_t trajectory_seed)
      : Error(what),
        trajectory_(trajectory),
        base_seed_(base_seed),
        trajectory_seed_(trajectory_seed) {}

  std::uint64_t trajectory() const noexcept { return trajectory_; }
  std::uint64_t base_seed() const noexcept { return base_seed_; }
  std::uint64_t trajectory_seed() const noexcept { return trajectory_seed_; }

 private:
  std::uint64_t trajectory_;
  std::uint64_t base_seed_;
  std::uint64_t trajectory_seed_;
};

}  // namespace ntb
