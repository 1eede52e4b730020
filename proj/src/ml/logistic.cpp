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
#include <cmath>

#include "aeroflow/core/error.hpp"
#include "aeroflow/simd/kernels.hpp"
#include "trainers.hpp"

namespace aeroflow::ml::detail {

namespace {

// Softmax over [bias, w] . [1, z]; max-subtracted for stability.
void softmax_into(const std::vector<std::vector<double>>& weights, std::span<const double> z,
                  std::vector<double>& out) {
  const std::size_t c = weights.size();
  out.resize(c);
  double hi = -INFINITY;
  for (std::size_t k = 0; k < c; ++k) {
    out[k] = weights[k][0] + simd::dot(std::span<const double>(weights[k]).subspan(1), z);
    hi = std::max(hi, out[k]);
  }
  double total = 0.0;
  for (auto& v : out) {
    v = std::exp(v - hi);
    total += v;
  }
  for (auto& v : out) v /= total;
}

}  // namespace

TrainedModel train_logistic(const pipeline::Dataset& data, const std::vector<std::string>& classes,
                            const std::vector<int>& labels, const Hyper& hyper) {
  check_trainable(data);
  if (!(hyper.logistic_step > 0.0)) throw Error(ErrorCode::BadHyper, "logistic step must be > 0");
  if (hyper.logistic_iterations < 1) throw Error(ErrorCode::BadHyper, "logistic iterations must be >= 1");
  if (!(hyper.logistic_l2 >= 0.0)) throw Error(ErrorCode::BadHyper, "logistic l2 must be >= 0");

  FeatureSchema schema = standardizing_schema(data);
  const std::size_t d = data.cols;
  const std::size_t c = classes.size();
  LogisticParams params;
  params.classes = classes;
  params.step = hyper.logistic_step;
  params.iterations = hyper.logistic_iterations;
  params.l2 = hyper.logistic_l2;
  params.weights.assign(c, std::vector<double>(d + 1, 0.0));
  params.single_class = c == 1;

  if (!params.single_class) {
    std::vector<double> z(data.rows * d);
    for (std::size_t p = 0; p < data.rows; ++p) {
      schema.standardize(data.row(p), std::span<double>(z.data() + p * d, d));
    }
    std::vector<std::vector<double>> grad(c, std::vector<double>(d + 1));
    std::vector<double> prob;
    const double inv_n = 1.0 / static_cast<double>(data.rows);
    for (int it = 0; it < hyper.logistic_iterations; ++it) {
      for (auto& g : grad) std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t p = 0; p < data.rows; ++p) {
        std::span<const double> zp(z.data() + p * d, d);
        softmax_into(params.weights, zp, prob);
        for (std::size_t k = 0; k < c; ++k) {
          const double err = prob[k] - (labels[p] == static_cast<int>(k) ? 1.0 : 0.0);
          grad[k][0] += err;
          simd::axpy(err, zp, std::span<double>(grad[k]).subspan(1));
        }
      }
      for (std::size_t k = 0; k < c; ++k) {
        auto& w = params.weights[k];
        w[0] -= hyper.logistic_step * grad[k][0] * inv_n;
        for (std::size_t j = 1; j <= d; ++j) {
          w[j] -= hyper.logistic_step * (grad[k][j] * inv_n + hyper.logistic_l2 * w[j]);
        }
      }
    }
  }

  TrainedModel m;
  m.kind = ModelKind::Logistic;
  m.schema = std::move(schema);
  m.params = std::move(params);
  m.meta = {data.rows, "", hyper.seed};
  return m;
}

std::vector<double> logistic_probabilities(const TrainedModel& model, const LogisticParams& p,
                                           std::span<const double> x) {
  std::vector<double> z(x.size());
  model.schema.standardize(x, z);
  std::vector<double> out;
  softmax_into(p.weights, z, out);
  return out;
}

}  // namespace aeroflow::ml::detail
