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
#include <string>
#include <vector>

namespace aeroflow::pipeline {

/// P x d row-major feature matrix with aligned targets. `alt_y[p]` holds up to
/// two alternative ground-truth values for row p (empty when unambiguous).
struct Dataset {
  std::vector<std::string> feature_names;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> X;
  std::vector<double> y;
  std::vector<std::vector<double>> alt_y;

  std::span<const double> row(std::size_t p) const { return {X.data() + p * cols, cols}; }
  double at(std::size_t p, std::size_t j) const { return X[p * cols + j]; }

  bool has_alternatives() const {
    for (const auto& a : alt_y) {
      if (!a.empty()) return true;
    }
    return false;
  }

  void add_row(std::span<const double> x, double target, std::vector<double> alternatives = {}) {
    X.insert(X.end(), x.begin(), x.end());
    y.push_back(target);
    alt_y.push_back(std::move(alternatives));
    ++rows;
  }

  Dataset subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.feature_names = feature_names;
    out.cols = cols;
    out.X.reserve(indices.size() * cols);
    for (std::size_t p : indices) out.add_row(row(p), y[p], alt_y.empty() ? std::vector<double>{} : alt_y[p]);
    return out;
  }
};

}  // namespace aeroflow::pipeline
