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

#include "aeroflow/core/error.hpp"
#include "aeroflow/ml/model.hpp"

namespace aeroflow::ml {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json tree_to_json(const RegressionTree& tree, std::size_t i) {
  const auto& n = tree.nodes[i];
  ordered_json j;
  if (n.is_leaf()) {
    j["leaf"] = n.value;
    return j;
  }
  j["feature"] = n.feature;
  j["threshold"] = n.threshold;
  j["left"] = tree_to_json(tree, static_cast<std::size_t>(n.left));
  j["right"] = tree_to_json(tree, static_cast<std::size_t>(n.right));
  return j;
}

// Rebuilds the breadth-first flat layout the trainer produces, so a loaded
// tree compares equal to the trained one.
RegressionTree tree_from_json(const nlohmann::json& root, std::size_t width) {
  RegressionTree tree;
  std::vector<const nlohmann::json*> queue{&root};
  tree.nodes.emplace_back();
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const auto& j = *queue[qi];
    auto& node = tree.nodes[qi];
    if (j.contains("leaf")) {
      node.value = j.at("leaf").get<double>();
      continue;
    }
    node.feature = j.at("feature").get<int>();
    if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= width) {
      throw Error(ErrorCode::SchemaMismatch, "tree split feature outside the feature schema");
    }
    node.threshold = j.at("threshold").get<double>();
    node.left = static_cast<int>(queue.size());
    node.right = node.left + 1;
    queue.push_back(&j.at("left"));
    queue.push_back(&j.at("right"));
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
  }
  return tree;
}

ordered_json params_to_json(const TrainedModel& m) {
  ordered_json j;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MeanParams>) {
          j["value"] = p.value;
        } else if constexpr (std::is_same_v<T, RidgeParams>) {
          j["weights"] = p.weights;
          j["intercept"] = p.intercept;
          j["lambda"] = p.lambda;
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          j["k"] = p.k;
          j["X_columns"] = p.X;
          j["y"] = p.y;
        } else if constexpr (std::is_same_v<T, GbmParams>) {
          j["f0"] = p.f0;
          j["shrinkage"] = p.shrinkage;
          j["max_depth"] = p.max_depth;
          j["min_samples_leaf"] = p.min_samples_leaf;
          ordered_json trees = ordered_json::array();
          for (const auto& t : p.trees) trees.push_back(tree_to_json(t, 0));
          j["trees"] = std::move(trees);
        } else {
          j["classes"] = p.classes;
          j["weights"] = p.weights;
          j["step"] = p.step;
          j["iterations"] = p.iterations;
          j["l2"] = p.l2;
          j["single_class"] = p.single_class;
        }
      },
      m.params);
  return j;
}

ModelParams params_from_json(ModelKind kind, const nlohmann::json& j, std::size_t width) {
  switch (kind) {
    case ModelKind::Mean: return MeanParams{j.at("value").get<double>()};
    case ModelKind::Ridge: {
      RidgeParams p{j.at("weights").get<std::vector<double>>(), j.at("intercept").get<double>(),
                    j.at("lambda").get<double>()};
      if (p.weights.size() != width) throw Error(ErrorCode::SchemaMismatch, "ridge weight count != feature count");
      return p;
    }
    case ModelKind::Knn: {
      KnnParams p{j.at("k").get<int>(), j.at("X_columns").get<std::vector<double>>(), j.at("y").get<std::vector<double>>()};
      if (p.X.size() != p.y.size() * width) throw Error(ErrorCode::SchemaMismatch, "knn matrix size != rows x features");
      if (p.k < 1 || p.y.empty()) throw Error(ErrorCode::SchemaMismatch, "knn needs k >= 1 and stored rows");
      return p;
    }
    case ModelKind::Gbm: {
      GbmParams p;
      p.f0 = j.at("f0").get<double>();
      p.shrinkage = j.at("shrinkage").get<double>();
      p.max_depth = j.at("max_depth").get<int>();
      p.min_samples_leaf = j.at("min_samples_leaf").get<int>();
      for (const auto& t : j.at("trees")) p.trees.push_back(tree_from_json(t, width));
      return p;
    }
    case ModelKind::Logistic: {
      LogisticParams p;
      p.classes = j.at("classes").get<std::vector<std::string>>();
      p.weights = j.at("weights").get<std::vector<std::vector<double>>>();
      p.step = j.at("step").get<double>();
      p.iterations = j.at("iterations").get<int>();
      p.l2 = j.at("l2").get<double>();
      p.single_class = j.at("single_class").get<bool>();
      if (p.classes.empty() || p.weights.size() != p.classes.size()) {
        throw Error(ErrorCode::SchemaMismatch, "logistic class/weight count mismatch");
      }
      for (const auto& w : p.weights) {
        if (w.size() != width + 1) throw Error(ErrorCode::SchemaMismatch, "logistic weight width != features + 1");
      }
      return p;
    }
  }
  throw Error(ErrorCode::SchemaMismatch, "unhandled model kind");
}

}  // namespace

ordered_json to_json(const TrainedModel& m) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["model_kind"] = to_string(m.kind);
  j["feature_schema"] = {{"names", m.schema.names}, {"means", m.schema.means}, {"scales", m.schema.scales}};
  j["params"] = params_to_json(m);
  j["trained_range"] = m.meta.trained_range;
  if (!m.sector_id.empty()) j["sector_id"] = m.sector_id;
  if (!m.airport_id.empty()) j["airport_id"] = m.airport_id;
  j["target"] = m.target;
  j["train_meta"] = {{"samples", m.meta.samples}, {"seed", m.meta.seed}};
  return j;
}

TrainedModel from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::SchemaMismatch, "artifact is not a JSON object");
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error(ErrorCode::SchemaMismatch, "unsupported schema_version");
    }
    const auto kind_name = j.at("model_kind").get<std::string>();
    auto kind = parse_model_kind(kind_name);
    if (!kind) throw Error(ErrorCode::SchemaMismatch, "unknown model_kind '" + kind_name + "'");
    TrainedModel m;
    m.kind = *kind;
    const auto& fs = j.at("feature_schema");
    m.schema.names = fs.at("names").get<std::vector<std::string>>();
    m.schema.means = fs.at("means").get<std::vector<double>>();
    m.schema.scales = fs.at("scales").get<std::vector<double>>();
    const auto d = m.schema.names.size();
    if (m.schema.means.size() != d || m.schema.scales.size() != d) {
      throw Error(ErrorCode::SchemaMismatch, "feature schema arrays differ in length");
    }
    m.params = params_from_json(m.kind, j.at("params"), d);
    m.meta.trained_range = j.at("trained_range").get<std::string>();
    if (j.contains("sector_id")) m.sector_id = j.at("sector_id").get<std::string>();
    if (j.contains("airport_id")) m.airport_id = j.at("airport_id").get<std::string>();
    m.target = j.at("target").get<std::string>();
    m.meta.samples = j.at("train_meta").at("samples").get<std::size_t>();
    m.meta.seed = j.at("train_meta").at("seed").get<std::uint64_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("artifact: ") + e.what());
  }
}

std::string serialize(const TrainedModel& model) { return to_json(model).dump(); }

}  // namespace aeroflow::ml
