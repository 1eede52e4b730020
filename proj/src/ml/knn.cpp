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

#include <algorithm>
#include <numeric>

#include "aeroflow/core/error.hpp"
#include "aeroflow/simd/kernels.hpp"
#include "trainers.hpp"

namespace aeroflow::ml::detail {

TrainedModel train_knn(const pipeline::Dataset& data, const Hyper& hyper) {
  check_trainable(data);
  if (hyper.knn_k < 1) throw Error(ErrorCode::BadHyper, "knn k must be >= 1");

  FeatureSchema schema = standardizing_schema(data);
  KnnParams params;
  params.k = hyper.knn_k;
  params.y = data.y;
  // Dimension-major so the distance sweep runs over contiguous memory.
  params.X.resize(data.rows * data.cols);
  for (std::size_t j = 0; j < data.cols; ++j) {
    for (std::size_t p = 0; p < data.rows; ++p) {
      params.X[j * data.rows + p] = (data.at(p, j) - schema.means[j]) / schema.scales[j];
    }
  }

  TrainedModel m;
  m.kind = ModelKind::Knn;
  m.schema = std::move(schema);
  m.params = std::move(params);
  m.meta = {data.rows, "", hyper.seed};
  return m;
}

double knn_predict(const TrainedModel& model, const KnnParams& p, std::span<const double> x) {
  const std::size_t n = p.y.size();
  const std::size_t d = model.schema.size();
  thread_local std::vector<double> query;
  thread_local std::vector<double> dist;
  thread_local std::vector<std::size_t> order;
  query.resize(d);
  dist.resize(n);
  model.schema.standardize(x, query);
  simd::kernels().squared_distances(query.data(), p.X.data(), n, d, dist.data());

  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(p.k), n);
  if (k == 1) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (dist[i] < dist[best]) best = i;
    }
    return p.y[best];
  }
  order.resize(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto closer = [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), closer);
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += p.y[order[i]];
  return sum / static_cast<double>(k);
}

}  // namespace aeroflow::ml::detail
