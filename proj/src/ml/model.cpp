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
#include <sstream>

#include "aeroflow/core/error.hpp"
#include "aeroflow/simd/kernels.hpp"
#include "trainers.hpp"

namespace aeroflow::ml {

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Mean: return "MEAN";
    case ModelKind::Ridge: return "RIDGE";
    case ModelKind::Knn: return "KNN";
    case ModelKind::Gbm: return "GBM";
    case ModelKind::Logistic: return "LOGISTIC";
  }
  return "MEAN";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) noexcept {
  for (auto k : {ModelKind::Mean, ModelKind::Ridge, ModelKind::Knn, ModelKind::Gbm, ModelKind::Logistic}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

void FeatureSchema::standardize(std::span<const double> x, std::span<double> out) const {
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - means[j]) / scales[j];
}

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

std::string Hyper::describe(ModelKind kind) const {
  std::ostringstream os;
  os << to_string(kind);
  switch (kind) {
    case ModelKind::Mean: break;
    case ModelKind::Ridge: os << "(lambda=" << ridge_lambda << ")"; break;
    case ModelKind::Knn: os << "(k=" << knn_k << ")"; break;
    case ModelKind::Gbm:
      os << "(M=" << gbm_rounds << ",D=" << gbm_depth << ",nu=" << gbm_shrinkage << ",min_leaf=" << gbm_min_leaf << ")";
      break;
    case ModelKind::Logistic: os << "(step=" << logistic_step << ",iters=" << logistic_iterations << ")"; break;
  }
  return os.str();
}

namespace detail {

void check_trainable(const pipeline::Dataset& data) {
  if (data.rows == 0) throw Error(ErrorCode::EmptyDataset, "no training rows");
  if (data.X.size() != data.rows * data.cols || data.y.size() != data.rows) {
    throw Error(ErrorCode::EmptyDataset, "dataset arrays are not aligned");
  }
  for (double v : data.X) {
    if (!std::isfinite(v)) throw Error(ErrorCode::EmptyDataset, "non-finite feature value");
  }
  for (double v : data.y) {
    if (!std::isfinite(v)) throw Error(ErrorCode::EmptyDataset, "non-finite target value");
  }
}

FeatureSchema identity_schema(const pipeline::Dataset& data) {
  FeatureSchema s;
  s.names = data.feature_names;
  if (s.names.size() != data.cols) {
    s.names.clear();
    for (std::size_t j = 0; j < data.cols; ++j) s.names.push_back("f" + std::to_string(j));
  }
  s.means.assign(data.cols, 0.0);
  s.scales.assign(data.cols, 1.0);
  return s;
}

FeatureSchema standardizing_schema(const pipeline::Dataset& data) {
  FeatureSchema s = identity_schema(data);
  const auto n = static_cast<double>(data.rows);
  for (std::size_t j = 0; j < data.cols; ++j) {
    double sum = 0.0;
    for (std::size_t p = 0; p < data.rows; ++p) sum += data.at(p, j);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t p = 0; p < data.rows; ++p) {
      const double d = data.at(p, j) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / n);
    s.means[j] = mean;
    // Constant columns keep scale 1 so they standardize to exactly zero.
    s.scales[j] = sd > 1e-12 * (std::abs(mean) + 1.0) ? sd : 1.0;
  }
  return s;
}

TrainedModel train_mean(const pipeline::Dataset& data, const Hyper& hyper) {
  check_trainable(data);
  double sum = 0.0;
  for (double v : data.y) sum += v;
  TrainedModel m;
  m.kind = ModelKind::Mean;
  m.schema = identity_schema(data);
  m.params = MeanParams{sum / static_cast<double>(data.rows)};
  m.meta = {data.rows, "", hyper.seed};
  return m;
}

}  // namespace detail

namespace {

void check_width(const TrainedModel& model, std::span<const double> x) {
  if (x.size() != model.schema.size()) {
    throw Error(ErrorCode::SchemaMismatch, "feature vector has " + std::to_string(x.size()) + " values, model expects " +
                                               std::to_string(model.schema.size()));
  }
}

}  // namespace

double predict_raw(const TrainedModel& model, std::span<const double> x) {
  check_width(model, x);
  switch (model.kind) {
    case ModelKind::Mean: return std::get<MeanParams>(model.params).value;
    case ModelKind::Ridge: {
      const auto& p = std::get<RidgeParams>(model.params);
      return p.intercept + simd::dot(p.weights, x);
    }
    case ModelKind::Knn: return detail::knn_predict(model, std::get<KnnParams>(model.params), x);
    case ModelKind::Gbm: {
      const auto& p = std::get<GbmParams>(model.params);
      double f = p.f0;
      for (const auto& t : p.trees) f = std::fma(p.shrinkage, t.predict(x), f);
      return f;
    }
    case ModelKind::Logistic: {
      auto probs = detail::logistic_probabilities(model, std::get<LogisticParams>(model.params), x);
      return static_cast<double>(argmax(probs));
    }
  }
  return 0.0;
}

double predict(const TrainedModel& model, std::span<const double> x) {
  const double raw = predict_raw(model, x);
  return raw > 0.0 ? raw : 0.0;
}

double predict(const TrainedModel& model, std::span<const double> x, std::span<const std::string> names) {
  if (!std::equal(names.begin(), names.end(), model.schema.names.begin(), model.schema.names.end())) {
    throw Error(ErrorCode::SchemaMismatch, "feature names differ from the model's schema");
  }
  return predict(model, x);
}

int argmax(std::span<const double> values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

ClassPrediction predict_class(const TrainedModel& model, std::span<const double> x) {
  check_width(model, x);
  if (model.kind != ModelKind::Logistic) {
    throw Error(ErrorCode::SchemaMismatch, "predict_class needs a LOGISTIC model");
  }
  const auto& p = std::get<LogisticParams>(model.params);
  ClassPrediction out;
  out.probabilities = detail::logistic_probabilities(model, p, x);
  out.label = argmax(out.probabilities);
  out.name = p.classes[static_cast<std::size_t>(out.label)];
  return out;
}

std::vector<double> gbm_staged_sse(const TrainedModel& model, const pipeline::Dataset& data) {
  const auto& p = std::get<GbmParams>(model.params);
  std::vector<double> f(data.rows, p.f0);
  std::vector<double> out;
  auto sse = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < data.rows; ++i) {
      const double r = data.y[i] - f[i];
      s += r * r;
    }
    return s;
  };
  out.push_back(sse());
  for (const auto& t : p.trees) {
    for (std::size_t i = 0; i < data.rows; ++i) f[i] = std::fma(p.shrinkage, t.predict(data.row(i)), f[i]);
    out.push_back(sse());
  }
  return out;
}

const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> entries{
      {ModelKind::Mean, &detail::train_mean},
      {ModelKind::Ridge, &detail::train_ridge},
      {ModelKind::Knn, &detail::train_knn},
      {ModelKind::Gbm, &detail::train_gbm},
  };
  return entries;
}

TrainedModel train(ModelKind kind, const pipeline::Dataset& data, const Hyper& hyper) {
  if (kind == ModelKind::Logistic) {
    detail::check_trainable(data);
    int max_label = 0;
    std::vector<int> labels;
    for (double v : data.y) {
      if (v < 0 || v != std::floor(v)) throw Error(ErrorCode::BadHyper, "LOGISTIC targets must be class indices");
      labels.push_back(static_cast<int>(v));
      max_label = std::max(max_label, labels.back());
    }
    std::vector<std::string> classes;
    for (int c = 0; c <= max_label; ++c) classes.push_back(std::to_string(c));
    return detail::train_logistic(data, classes, labels, hyper);
  }
  for (const auto& e : registry()) {
    if (e.kind == kind) return e.trainer(data, hyper);
  }
  throw Error(ErrorCode::BadHyper, "no trainer registered for " + std::string(to_string(kind)));
}

TrainedModel train_classifier(const pipeline::Dataset& data, const std::vector<std::string>& labels,
                              const Hyper& hyper) {
  detail::check_trainable(data);
  if (labels.size() != data.rows) throw Error(ErrorCode::EmptyDataset, "label count differs from row count");
  std::vector<std::string> classes = labels;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  std::vector<int> idx;
  idx.reserve(labels.size());
  for (const auto& l : labels) {
    idx.push_back(static_cast<int>(std::lower_bound(classes.begin(), classes.end(), l) - classes.begin()));
  }
  return detail::train_logistic(data, classes, idx, hyper);
}

}  // namespace aeroflow::ml
