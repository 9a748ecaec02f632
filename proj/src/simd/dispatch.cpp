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

#include <cstdlib>
#include <string_view>

#include "noisytb/kernels.hpp"

namespace ntb::simd {

#if defined(NTB_HAVE_AVX2)
const Kernels& avx2_kernels_table();
#endif

const Kernels* avx2_kernels() {
#if defined(NTB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernels_table() : nullptr;
#else
  return nullptr;
#endif
}

const Kernels& active_kernels() {
  static const Kernels* chosen = [] {
    const char* env = std::getenv("NTB_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return &scalar_kernels();
    const Kernels* v = avx2_kernels();
    return v != nullptr ? v : &scalar_kernels();
  }();
  return *chosen;
}

}  // namespace ntb::simd
