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

#if defined(AEROFLOW_HAVE_AVX2)

#include <immintrin.h>

#include "aeroflow/simd/kernels.hpp"

namespace aeroflow::simd::avx2 {

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc0);
  __m128d hi = _mm256_extractf128_pd(acc0, 1);
  lo = _mm_add_pd(lo, hi);
  double acc = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) {
    __m128d r = _mm_fmadd_sd(_mm_set_sd(alpha), _mm_set_sd(x[i]), _mm_set_sd(y[i]));
    y[i] = _mm_cvtsd_f64(r);
  }
}

void squared_distances(const double* query, const double* columns, std::size_t n_points, std::size_t n_dims,
                       double* out) {
  std::size_t i = 0;
  const std::size_t vec_end = n_points & ~std::size_t{3};
  for (i = 0; i < vec_end; i += 4) _mm256_storeu_pd(out + i, _mm256_setzero_pd());
  for (; i < n_points; ++i) out[i] = 0.0;

  for (std::size_t j = 0; j < n_dims; ++j) {
    const __m256d q = _mm256_set1_pd(query[j]);
    const double* col = columns + j * n_points;
    for (i = 0; i < vec_end; i += 4) {
      __m256d d = _mm256_sub_pd(_mm256_loadu_pd(col + i), q);
      _mm256_storeu_pd(out + i, _mm256_fmadd_pd(d, d, _mm256_loadu_pd(out + i)));
    }
    for (; i < n_points; ++i) {
      double d = col[i] - query[j];
      out[i] = _mm_cvtsd_f64(_mm_fmadd_sd(_mm_set_sd(d), _mm_set_sd(d), _mm_set_sd(out[i])));
    }
  }
}

}  // namespace aeroflow::simd::avx2

#endif
