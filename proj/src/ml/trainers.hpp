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

#include "aeroflow/ml/model.hpp"

namespace aeroflow::ml::detail {

void check_trainable(const pipeline::Dataset& data);
FeatureSchema identity_schema(const pipeline::Dataset& data);
FeatureSchema standardizing_schema(const pipeline::Dataset& data);

TrainedModel train_mean(const pipeline::Dataset& data, const Hyper& hyper);
TrainedModel train_ridge(const pipeline::Dataset& data, const Hyper& hyper);
TrainedModel train_knn(const pipeline::Dataset& data, const Hyper& hyper);
TrainedModel train_gbm(const pipeline::Dataset& data, const Hyper& hyper);
TrainedModel train_logistic(const pipeline::Dataset& data, const std::vector<std::string>& classes,
                            const std::vector<int>& labels, const Hyper& hyper);

double knn_predict(const TrainedModel& model, const KnnParams& p, std::span<const double> x);
std::vector<double> logistic_probabilities(const TrainedModel& model, const LogisticParams& p,
                                           std::span<const double> x);

}  // namespace aeroflow::ml::detail
