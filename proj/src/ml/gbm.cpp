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
#include <cstdint>

#include "aeroflow/core/error.hpp"
#include "trainers.hpp"

namespace aeroflow::ml::detail {

namespace {

// Per-feature sorted unique values and each row's rank among them. Split
// search over these bins visits exactly the midpoints between consecutive
// unique values present in a node, so it is the exact search in O(n + bins).
struct BinnedFeatures {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<std::uint32_t>> bin;  // [feature][row]

  explicit BinnedFeatures(const pipeline::Dataset& data) : values(data.cols), bin(data.cols) {
    std::vector<double> col(data.rows);
    for (std::size_t j = 0; j < data.cols; ++j) {
      for (std::size_t p = 0; p < data.rows; ++p) col[p] = data.at(p, j);
      auto& u = values[j];
      u = col;
      std::sort(u.begin(), u.end());
      u.erase(std::unique(u.begin(), u.end()), u.end());
      auto& b = bin[j];
      b.resize(data.rows);
      for (std::size_t p = 0; p < data.rows; ++p) {
        b[p] = static_cast<std::uint32_t>(std::lower_bound(u.begin(), u.end(), col[p]) - u.begin());
      }
    }
  }
};

struct Split {
  int feature = -1;
  std::uint32_t bin = 0;  // rows with bin <= this go left
  double threshold = 0.0;
  double gain = 0.0;
};

double midpoint(double lo, double hi) {
  double m = (lo + hi) / 2.0;
  // Adjacent doubles can round the midpoint up to `hi`; keep `hi` on the right.
  return m < hi ? m : lo;
}

Split find_split(const BinnedFeatures& bins, std::span<const double> residuals, std::span<const std::size_t> rows,
                 int min_leaf) {
  Split best;
  const auto n = rows.size();
  if (n < 2 * static_cast<std::size_t>(min_leaf)) return best;
  double total = 0.0;
  for (auto r : rows) total += residuals[r];
  const double parent = total * total / static_cast<double>(n);

  std::vector<double> sum;
  std::vector<std::uint32_t> cnt;
  for (std::size_t j = 0; j < bins.values.size(); ++j) {
    const auto nb = bins.values[j].size();
    if (nb < 2) continue;
    sum.assign(nb, 0.0);
    cnt.assign(nb, 0);
    const auto& b = bins.bin[j];
    for (auto r : rows) {
      sum[b[r]] += residuals[r];
      ++cnt[b[r]];
    }
    double left_sum = 0.0;
    std::size_t left_n = 0;
    std::size_t prev = nb;  // last non-empty bin seen
    for (std::size_t k = 0; k < nb; ++k) {
      if (cnt[k] == 0) continue;
      if (prev != nb && left_n >= static_cast<std::size_t>(min_leaf) && n - left_n >= static_cast<std::size_t>(min_leaf)) {
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(left_n) +
                            right_sum * right_sum / static_cast<double>(n - left_n) - parent;
        if (gain > best.gain) {
          best.feature = static_cast<int>(j);
          best.bin = static_cast<std::uint32_t>(prev);
          best.threshold = midpoint(bins.values[j][prev], bins.values[j][k]);
          best.gain = gain;
        }
      }
      left_sum += sum[k];
      left_n += cnt[k];
      prev = k;
    }
  }
  return best;
}

RegressionTree grow_tree(const BinnedFeatures& bins, std::span<const double> residuals, std::size_t n_rows,
                         int max_depth, int min_leaf, std::vector<double>& leaf_of_row) {
  RegressionTree tree;
  struct Pending {
    std::size_t node;
    int depth;
    std::vector<std::size_t> rows;
  };
  std::vector<Pending> queue;
  std::vector<std::size_t> all(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) all[i] = i;
  tree.nodes.emplace_back();
  queue.push_back({0, 0, std::move(all)});

  // Breadth-first so node numbering is stable level by level.
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    Pending cur = std::move(queue[qi]);
    Split s;
    if (cur.depth < max_depth) s = find_split(bins, residuals, cur.rows, min_leaf);
    if (s.feature < 0) {
      double sum = 0.0;
      for (auto r : cur.rows) sum += residuals[r];
      const double value = sum / static_cast<double>(cur.rows.size());
      tree.nodes[cur.node].value = value;
      for (auto r : cur.rows) leaf_of_row[r] = value;
      continue;
    }
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    const auto& b = bins.bin[static_cast<std::size_t>(s.feature)];
    for (auto r : cur.rows) (b[r] <= s.bin ? left : right).push_back(r);
    const auto li = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[cur.node];
    node.feature = s.feature;
    node.threshold = s.threshold;
    node.left = static_cast<int>(li);
    node.right = static_cast<int>(li + 1);
    queue.push_back({li, cur.depth + 1, std::move(left)});
    queue.push_back({li + 1, cur.depth + 1, std::move(right)});
  }
  return tree;
}

}  // namespace

SplitChoice best_split(const pipeline::Dataset& data, std::span<const double> residuals,
                       std::span<const std::size_t> rows, int min_samples_leaf) {
  BinnedFeatures bins(data);
  Split s = find_split(bins, residuals, rows, min_samples_leaf);
  return {s.feature, s.threshold, s.gain};
}

// Least-squares boosting: F0 = mean(y); each round fits a depth-limited tree to
// the residuals y - F with leaf values equal to the residual means, then
// F += shrinkage * tree.
TrainedModel train_gbm(const pipeline::Dataset& data, const Hyper& hyper) {
  check_trainable(data);
  if (hyper.gbm_rounds < 1 || hyper.gbm_rounds > 100000) throw Error(ErrorCode::BadHyper, "gbm rounds out of range");
  if (hyper.gbm_depth < 1 || hyper.gbm_depth > 16) throw Error(ErrorCode::BadHyper, "gbm depth out of range");
  if (!(hyper.gbm_shrinkage > 0.0 && hyper.gbm_shrinkage <= 1.0)) {
    throw Error(ErrorCode::BadHyper, "gbm shrinkage must lie in (0, 1]");
  }
  if (hyper.gbm_min_leaf < 1) throw Error(ErrorCode::BadHyper, "gbm min leaf must be >= 1");

  const BinnedFeatures bins(data);
  GbmParams params;
  params.shrinkage = hyper.gbm_shrinkage;
  params.max_depth = hyper.gbm_depth;
  params.min_samples_leaf = hyper.gbm_min_leaf;
  double sum = 0.0;
  for (double v : data.y) sum += v;
  params.f0 = sum / static_cast<double>(data.rows);

  std::vector<double> f(data.rows, params.f0);
  std::vector<double> next(data.rows);
  std::vector<double> residuals(data.rows);
  std::vector<double> leaf_of_row(data.rows);
  const auto sse = [&](const std::vector<double>& fit) {
    double s = 0.0;
    for (std::size_t i = 0; i < data.rows; ++i) {
      const double r = data.y[i] - fit[i];
      s += r * r;
    }
    return s;
  };
  double current = sse(f);
  params.trees.reserve(static_cast<std::size_t>(hyper.gbm_rounds));
  for (int m = 0; m < hyper.gbm_rounds; ++m) {
    for (std::size_t i = 0; i < data.rows; ++i) residuals[i] = data.y[i] - f[i];
    auto tree = grow_tree(bins, residuals, data.rows, hyper.gbm_depth, hyper.gbm_min_leaf, leaf_of_row);
    for (std::size_t i = 0; i < data.rows; ++i) next[i] = std::fma(params.shrinkage, leaf_of_row[i], f[i]);
    const double candidate = sse(next);
    // Once converged, leaf means are rounding noise and can nudge the loss up
    // by a few ulps. Such a round is replaced by a zero tree.
    if (candidate > current) {
      params.trees.push_back(RegressionTree{{TreeNode{}}});
      continue;
    }
    params.trees.push_back(std::move(tree));
    f.swap(next);
    current = candidate;
  }

  TrainedModel model;
  model.kind = ModelKind::Gbm;
  model.schema = identity_schema(data);
  model.params = std::move(params);
  model.meta = {data.rows, "", hyper.seed};
  return model;
}

}  // namespace aeroflow::ml::detail
