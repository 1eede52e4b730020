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

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops shared by the models. Each kernel has a scalar
// reference in kernels_scalar.cpp and an AVX2/FMA variant in kernels_avx2.cpp;
// the variant is chosen once at startup from CPUID. Setting
// AEROFLOW_SIMD=scalar in the environment forces the reference path.

namespace aeroflow::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// out[i] = sum_j (columns[j * n_points + i] - query[j])^2, columns stored
  /// dimension-major so the sweep over points is contiguous.
  void (*squared_distances)(const double* query, const double* columns, std::size_t n_points, std::size_t n_dims,
                            double* out);
};

bool isa_supported(Isa isa) noexcept;
std::string_view isa_name(Isa isa) noexcept;

/// Active table (best supported ISA unless overridden by the environment).
const KernelTable& kernels() noexcept;
/// Explicit table, used by equivalence tests. Falls back to scalar when the
/// requested ISA is not supported by this CPU or build.
const KernelTable& kernels_for(Isa isa) noexcept;

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void squared_distances(const double* query, const double* columns, std::size_t n_points, std::size_t n_dims,
                       double* out);
}  // namespace scalar

#if defined(AEROFLOW_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void squared_distances(const double* query, const double* columns, std::size_t n_points, std::size_t n_dims,
                       double* out);
}  // namespace avx2
#endif

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  kernels().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

}  // namespace aeroflow::simd
