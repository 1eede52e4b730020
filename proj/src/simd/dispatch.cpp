// Copyright 2026 The Aeroflow Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <string_view>

#include "aeroflow/simd/kernels.hpp"

namespace aeroflow::simd {

namespace {

constexpr KernelTable kScalarTable{Isa::Scalar, &scalar::dot, &scalar::axpy, &scalar::squared_distances};

#if defined(AEROFLOW_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::Avx2, &avx2::dot, &avx2::axpy, &avx2::squared_distances};
#endif

bool cpu_has_avx2() noexcept {
#if defined(AEROFLOW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select_table() noexcept {
  if (const char* env = std::getenv("AEROFLOW_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
    return kScalarTable;
  }
  return kernels_for(Isa::Avx2);
}

}  // namespace

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
  }
  return false;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& kernels_for(Isa isa) noexcept {
#if defined(AEROFLOW_HAVE_AVX2)
  if (isa == Isa::Avx2 && cpu_has_avx2()) return kAvx2Table;
#endif
  (void)isa;
  return kScalarTable;
}

const KernelTable& kernels() noexcept {
  static const KernelTable& table = select_table();
  return table;
}

}  // namespace aeroflow::simd
