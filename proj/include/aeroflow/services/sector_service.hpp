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
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "aeroflow/eval/eval.hpp"
#include "aeroflow/ml/model.hpp"
#include "aeroflow/pipeline/features.hpp"
#include "aeroflow/services/topology.hpp"
#include "aeroflow/store/store.hpp"

namespace aeroflow::services {

struct SectorPredictor {
  std::string sector_id;
  pipeline::Target target = pipeline::Target::Occupancy;
  ml::TrainedModel model;
  double cv_score = 0.0;
  std::uint64_t version = 0;
  std::string model_id;  // empty when not published
};

struct SectorTraining {
  SectorPredictor predictor;
  eval::Selection selection;
  std::size_t excluded_rows = 0;
};

/// Per-sector prediction service. Predictions read an immutable snapshot of
/// the predictor table; retraining builds a new table and swaps the pointer.
class SectorService {
 public:
  /// `store` may be null for purely in-memory use (nothing is published).
  SectorService(PlatformConfig config, store::Store* store = nullptr, eval::CvConfig cv = {},
                std::vector<eval::Candidate> candidates = eval::default_candidates());

  /// Builds the dataset from prepared days, selects a model, publishes it and
  /// installs the new version. Throws Error{EmptyRange, AllCandidatesFailed}.
  SectorTraining train_sector(const std::string& sector_id, pipeline::Target target, const DateRange& range);
  /// Same, from an already assembled dataset.
  SectorTraining train_from_dataset(const std::string& sector_id, pipeline::Target target,
                                    const pipeline::Dataset& data, const std::string& trained_range);

  /// Installs a predictor as the next version for its (sector, target).
  std::uint64_t install(SectorPredictor predictor);
  /// Installs the latest published model of every known (sector, target).
  std::size_t load_published();

  /// Throws Error{NoPredictor}.
  double predict_sector(const std::string& sector_id, pipeline::Target target, EpochSeconds bucket_start,
                        const metar::WeatherObservation& weather) const;

  /// One value per bucket in [from, to), each using the latest observation at
  /// or before the bucket from `weather`. Throws Error{BadConfig} for
  /// unaligned or reversed bounds, Error{NoPredictor, NoWeather}.
  std::vector<std::pair<EpochSeconds, double>> predict_horizon(const std::string& sector_id, pipeline::Target target,
                                                               EpochSeconds from, EpochSeconds to,
                                                               const pipeline::WeatherSource& weather) const;

  std::shared_ptr<const SectorPredictor> predictor(const std::string& sector_id, pipeline::Target target) const;
  std::size_t predictor_count() const;
  const PlatformConfig& config() const { return config_; }
  const std::string& station_of(const std::string& sector_id) const;

 private:
  using Key = std::pair<std::string, pipeline::Target>;
  using Table = std::map<Key, std::shared_ptr<const SectorPredictor>>;

  std::shared_ptr<const Table> snapshot() const;

  PlatformConfig config_;
  store::Store* store_;
  eval::CvConfig cv_;
  std::vector<eval::Candidate> candidates_;
  mutable std::mutex mu_;  // guards the pointer swap only
  std::shared_ptr<const Table> table_;
};

}  // namespace aeroflow::services
