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

#include "noisytb/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "noisytb/error.hpp"
#include "noisytb/kernels.hpp"

namespace ntb {

void NoiseStream::normals(std::uint64_t step, NoiseChannel channel, std::size_t first,
                          std::size_t count, double* out) const {
  if (count == 0) return;
  const std::size_t first_pair = first / 2;
  const std::size_t end_pair = (first + count + 1) / 2;
  const std::size_t n_pairs = end_pair - first_pair;
  const auto tag = static_cast<std::uint32_t>(channel);
  const auto& k = simd::active_kernels();
  if (first % 2 == 0 && count % 2 == 0) {
    k.gaussian_pairs(key_, step, tag, first_pair, n_pairs, out);
    return;
  }
  // Odd alignment: draw whole pairs into scratch and copy the requested span.
  thread_local std::vector<double> scratch;
  scratch.resize(2 * n_pairs);
  k.gaussian_pairs(key_, step, tag, first_pair, n_pairs, scratch.data());
  const std::size_t skip = first - 2 * first_pair;
  for (std::size_t i = 0; i < count; ++i) out[i] = scratch[skip + i];
}

double NoiseStream::uniform(NoiseChannel channel, std::uint64_t index) const {
  const PhiloxCounter x = philox::generate(
      {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
       0x5EEDu, static_cast<std::uint32_t>(channel)},
      key_);
  return philox::unit_from_bits(x[0], x[1]);
}

std::vector<double> draw_real_increments(NoiseStream& stream, std::size_t n_sites,
                                         double dt) {
  if (stream.kind() != NoiseKind::real_wiener)
    throw ConfigError("draw_real_increments needs a real_wiener stream");
  std::vector<double> dw(n_sites);
  stream.normals(stream.next_step(), NoiseChannel::real_part, 0, n_sites, dw.data());
  const double s = std::sqrt(dt);
  for (double& v : dw) v *= s;
  return dw;
}

std::vector<std::complex<double>> draw_complex_increments(NoiseStream& stream,
                                                          std::size_t n_sites, double dt) {
  if (stream.kind() != NoiseKind::complex_wiener)
    throw ConfigError("draw_complex_increments needs a complex_wiener stream");
  std::vector<double> re(n_sites);
  std::vector<double> im(n_sites);
  const std::uint64_t step = stream.next_step();
  stream.normals(step, NoiseChannel::real_part, 0, n_sites, re.data());
  stream.normals(step, NoiseChannel::imag_part, 0, n_sites, im.data());
  const double s = std::sqrt(0.5 * dt);
  std::vector<std::complex<double>> out(n_sites);
  for (std::size_t i = 0; i < n_sites; ++i) out[i] = {s * re[i], s * im[i]};
  return out;
}

}  // namespace ntb
