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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "aeroflow/pipeline/dataset.hpp"

namespace aeroflow::ml {

/// Declaration order is the registry order used for tie-breaks.
enum class ModelKind { Mean, Ridge, Knn, Gbm, Logistic };

std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view s) noexcept;

/// Ordered feature names plus per-column standardization constants. Kinds
/// that do not standardize (MEAN, GBM) carry mean 0 / scale 1.
struct FeatureSchema {
  std::vector<std::string> names;
  std::vector<double> means;
  std::vector<double> scales;

  std::size_t size() const { return names.size(); }
  void standardize(std::span<const double> x, std::span<double> out) const;

  bool operator==(const FeatureSchema&) const = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// Flat binary tree; node 0 is the root. Samples with x[feature] <= threshold go left.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  int depth() const;
  bool operator==(const RegressionTree&) const = default;
};

struct MeanParams {
  double value = 0.0;
  bool operator==(const MeanParams&) const = default;
};

/// Weights and intercept in the original feature space; the solve itself
/// happens on standardized columns.
struct RidgeParams {
  std::vector<double> weights;
  double intercept = 0.0;
  double lambda = 0.0;
  bool operator==(const RidgeParams&) const = default;
};

struct KnnParams {
  int k = 1;
  std::vector<double> X;  // standardized training columns, dimension-major
  std::vector<double> y;
  bool operator==(const KnnParams&) const = default;
};

struct GbmParams {
  double f0 = 0.0;
  double shrinkage = 0.1;
  int max_depth = 3;
  int min_samples_leaf = 5;
  std::vector<RegressionTree> trees;
  bool operator==(const GbmParams&) const = default;
};

struct LogisticParams {
  std::vector<std::string> classes;         // index = class id, sorted ascending
  std::vector<std::vector<double>> weights;  // per class: [bias, w_1..w_d] on standardized features
  double step = 0.5;
  int iterations = 500;
  double l2 = 0.0;
  bool single_class = false;
  bool operator==(const LogisticParams&) const = default;
};

using ModelParams = std::variant<MeanParams, RidgeParams, KnnParams, GbmParams, LogisticParams>;

struct TrainMeta {
  std::size_t samples = 0;
  std::string trained_range;
  std::uint64_t seed = 0;
  bool operator==(const TrainMeta&) const = default;
};

struct TrainedModel {
  ModelKind kind = ModelKind::Mean;
  FeatureSchema schema;
  ModelParams params;
  TrainMeta meta;
  std::string sector_id;   // sector models
  std::string airport_id;  // runway-configuration classifiers
  std::string target;

  bool operator==(const TrainedModel&) const = default;
};

/// Kind-specific hyperparameters; only the fields of the chosen kind are read.
struct Hyper {
  double ridge_lambda = 1.0;
  int knn_k = 10;
  int gbm_rounds = 300;
  int gbm_depth = 3;
  double gbm_shrinkage = 0.1;
  int gbm_min_leaf = 5;
  double logistic_step = 0.5;
  int logistic_iterations = 500;
  double logistic_l2 = 0.0;
  std::uint64_t seed = 0;

  std::string describe(ModelKind kind) const;
};

/// Trains `kind` on `data`. Deterministic in (data, hyper). For LOGISTIC the
/// targets are class indices 0..C-1 named "0".."C-1"; use train_classifier to
/// attach real labels. Throws Error{EmptyDataset, SingularSystem, BadHyper}.
TrainedModel train(ModelKind kind, const pipeline::Dataset& data, const Hyper& hyper = {});

/// Multinomial logistic regression over string labels. Classes are sorted so
/// that argmax ties resolve to the lexicographically lowest label.
TrainedModel train_classifier(const pipeline::Dataset& data, const std::vector<std::string>& labels,
                              const Hyper& hyper = {});

/// Raw model output (unclamped). Throws Error{SchemaMismatch} on width mismatch.
double predict_raw(const TrainedModel& model, std::span<const double> x);
/// Clamped at zero: the targets are counts.
double predict(const TrainedModel& model, std::span<const double> x);
/// Same as predict, also checking feature names against the model schema.
double predict(const TrainedModel& model, std::span<const double> x, std::span<const std::string> names);

struct ClassPrediction {
  int label = 0;
  std::string name;
  std::vector<double> probabilities;
};

ClassPrediction predict_class(const TrainedModel& model, std::span<const double> x);

/// Index of the largest entry, lowest index on ties.
int argmax(std::span<const double> values);

/// Per-round training SSE of a GBM evaluated on (X, y): entry 0 is the
/// constant F0, entry m the ensemble after m trees.
std::vector<double> gbm_staged_sse(const TrainedModel& model, const pipeline::Dataset& data);

namespace detail {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

/// Best least-squares split of `rows` against `residuals` honouring the
/// minimum leaf size. Exposed for the exhaustive-search cross-check.
SplitChoice best_split(const pipeline::Dataset& data, std::span<const double> residuals,
                       std::span<const std::size_t> rows, int min_samples_leaf);

}  // namespace detail

/// Registry of trainable regression kinds in tie-break order.
struct RegistryEntry {
  ModelKind kind;
  std::function<TrainedModel(const pipeline::Dataset&, const Hyper&)> trainer;
};
const std::vector<RegistryEntry>& registry();

/// Artifact codec. from_json throws Error{SchemaMismatch} for unknown kinds,
/// missing keys, or parameter widths that disagree with the feature schema.
inline constexpr int kSchemaVersion = 1;
nlohmann::ordered_json to_json(const TrainedModel& model);
TrainedModel from_json(const nlohmann::json& j);
std::string serialize(const TrainedModel& model);

}  // namespace aeroflow::ml
