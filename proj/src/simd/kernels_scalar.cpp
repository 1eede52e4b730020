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

#include <cmath>

#include "aeroflow/simd/kernels.hpp"

namespace aeroflow::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

// std::fma keeps the per-lane rounding identical to the FMA variant.
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void squared_distances(const double* query, const double* columns, std::size_t n_points, std::size_t n_dims,
                       double* out) {
  for (std::size_t i = 0; i < n_points; ++i) out[i] = 0.0;
  for (std::size_t j = 0; j < n_dims; ++j) {
    const double q = query[j];
    const double* col = columns + j * n_points;
    for (std::size_t i = 0; i < n_points; ++i) {
      double d = col[i] - q;
      out[i] = std::fma(d, d, out[i]);
    }
  }
}

}  // namespace aeroflow::simd::scalar
