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

#include "noisytb/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "noisytb/error.hpp"

namespace ntb {

std::string_view to_string(Boundary b) {
  return b == Boundary::open ? "open" : "periodic";
}

Boundary parse_boundary(std::string_view s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  throw ConfigError("unknown boundary '" + std::string(s) + "' (expected open|periodic)");
}

void ModelParams::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ConfigError("gamma must be finite and >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
  if (n_sites < 3) throw ConfigError("lattice needs at least 3 sites");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be > 0");
}

WaveFunction::WaveFunction(std::size_t n_sites, std::int64_t origin_offset,
                           Boundary boundary)
    : n_(n_sites),
      origin_(origin_offset),
      boundary_(boundary),
      re_(n_sites + 2 * kPad, 0.0),
      im_(n_sites + 2 * kPad, 0.0) {
  if (boundary_ == Boundary::periodic) window_ = {0, n_};
}

void WaveFunction::set(std::size_t i, cplx c) {
  re_[kPad + i] = c.real();
  im_[kPad + i] = c.imag();
  if (c != cplx{} && !window_.contains(i)) {
    if (window_.size() == 0) {
      window_ = {i, i + 1};
    } else {
      window_.lo = std::min(window_.lo, i);
      window_.hi = std::max(window_.hi, i + 1);
    }
  }
}

void WaveFunction::clear() {
  std::fill(re_.begin(), re_.end(), 0.0);
  std::fill(im_.begin(), im_.end(), 0.0);
  window_ = boundary_ == Boundary::periodic ? SiteWindow{0, n_} : SiteWindow{};
}

void WaveFunction::collapse_to(std::size_t i) {
  std::fill(re_.begin() + kPad + window_.lo, re_.begin() + kPad + window_.hi, 0.0);
  std::fill(im_.begin() + kPad + window_.lo, im_.begin() + kPad + window_.hi, 0.0);
  re_[kPad + i] = 1.0;
  im_[kPad + i] = 0.0;
  if (boundary_ == Boundary::periodic) {
    re_[kPad - 1] = im_[kPad - 1] = 0.0;
    re_[kPad + n_] = im_[kPad + n_] = 0.0;
  } else {
    window_ = {i, i + 1};
  }
}

double WaveFunction::norm_sq() const {
  double s = 0.0;
  for (std::size_t i = window_.lo; i < window_.hi; ++i) s += weight(i);
  return s;
}

void WaveFunction::normalize() {
  const double n2 = norm_sq();
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw InstabilityError("cannot normalize a null or non-finite state");
  const double s = 1.0 / std::sqrt(n2);
  for (std::size_t i = window_.lo; i < window_.hi; ++i) {
    re_[kPad + i] *= s;
    im_[kPad + i] *= s;
  }
}

void WaveFunction::fill_ghosts() {
  if (boundary_ != Boundary::periodic) return;
  re_[kPad - 1] = re_[kPad + n_ - 1];
  im_[kPad - 1] = im_[kPad + n_ - 1];
  re_[kPad + n_] = re_[kPad];
  im_[kPad + n_] = im_[kPad];
}

std::vector<cplx> WaveFunction::amplitudes() const {
  std::vector<cplx> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = (*this)[i];
  return out;
}

DensityMatrix DensityMatrix::from_pure(const WaveFunction& psi) {
  const auto n = static_cast<Eigen::Index>(psi.size());
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = psi[static_cast<std::size_t>(i)];
  return DensityMatrix(Eigen::MatrixXcd(v * v.adjoint()));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return DensityMatrix(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(m, m) / double(n)));
}

DensityMatrix DensityMatrix::from_weights(const std::vector<double>& p) {
  DensityMatrix d(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    d.rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p[i];
  return d;
}

std::vector<double> DensityMatrix::diagonal() const {
  std::vector<double> p(size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = (*this)(i, i).real();
  return p;
}

double DensityMatrix::hermiticity_defect() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::string_view to_string(InitialKind k) {
  switch (k) {
    case InitialKind::gaussian_packet: return "gaussian";
    case InitialKind::delta_site: return "delta";
    case InitialKind::uniform: return "uniform";
  }
  return "?";
}

InitialKind parse_initial_kind(std::string_view s) {
  if (s == "gaussian" || s == "gaussian_packet") return InitialKind::gaussian_packet;
  if (s == "delta" || s == "delta_site") return InitialKind::delta_site;
  if (s == "uniform") return InitialKind::uniform;
  throw ConfigError("unknown initial state '" + std::string(s) +
                    "' (expected gaussian|delta|uniform)");
}

std::int64_t default_origin(std::size_t n_sites) {
  return static_cast<std::int64_t>(n_sites / 2);
}

namespace {

// Amplitudes whose weight is below this are stored as exact zeros.
constexpr double kInitialCutoff = 1e-36;

}  // namespace

WaveFunction make_initial(const ModelParams& params, const InitialState& spec) {
  params.validate();
  const std::size_t n = params.n_sites;
  const std::int64_t origin = default_origin(n);
  const std::int64_t first = -origin;
  const std::int64_t last = static_cast<std::int64_t>(n) - 1 - origin;
  if (spec.center < first || spec.center > last)
    throw ConfigError("initial centre " + std::to_string(spec.center) +
                      " lies outside the lattice");
  if (!(spec.variance >= 0.0)) throw ConfigError("initial variance must be >= 0");

  WaveFunction psi(n, origin, params.boundary);
  const std::size_t ci = psi.index_of(spec.center);

  switch (spec.kind) {
    case InitialKind::delta_site:
      psi.set(ci, 1.0);
      return psi;
    case InitialKind::uniform: {
      const double a = 1.0 / std::sqrt(double(n));
      for (std::size_t i = 0; i < n; ++i) psi.set(i, a);
      return psi;
    }
    case InitialKind::gaussian_packet:
      break;
  }

  if (spec.variance == 0.0) {
    psi.set(ci, 1.0);
    return psi;
  }

  // Weight that would fall outside the chain, relative to the infinite-lattice
  // total, decides whether the packet fits.
  const double inv = 1.0 / (2.0 * spec.variance);
  const auto reach = static_cast<std::int64_t>(std::ceil(40.0 * std::sqrt(spec.variance))) + 1;
  double inside = 0.0;
  double outside = 0.0;
  for (std::int64_t x = spec.center - reach; x <= spec.center + reach; ++x) {
    const double d = double(x - spec.center);
    const double w = std::exp(-d * d * inv);
    if (x < first || x > last) {
      outside += w;
    } else {
      inside += w;
    }
  }
  if (params.boundary == Boundary::open && outside / (inside + outside) > 1e-6)
    throw ConfigError("initial packet is wider than the lattice (tail weight " +
                      std::to_string(outside / (inside + outside)) + ")");

  for (std::int64_t x = std::max(first, spec.center - reach);
       x <= std::min(last, spec.center + reach); ++x) {
    const double d = double(x - spec.center);
    const double w = std::exp(-d * d * inv) / inside;
    if (w >= kInitialCutoff) psi.set(psi.index_of(x), std::sqrt(w));
  }
  psi.normalize();
  return psi;
}

}  // namespace ntb
