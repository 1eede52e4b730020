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

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "aeroflow/eval/eval.hpp"
#include "aeroflow/metar/metar.hpp"
#include "aeroflow/ml/model.hpp"
#include "aeroflow/pipeline/features.hpp"
#include "aeroflow/services/sector_service.hpp"
#include "aeroflow/services/topology.hpp"
#include "aeroflow/store/store.hpp"

namespace aeroflow::services {

/// Where the airport service gets sector flow predictions from. Any exception
/// thrown by predict() is treated as the dependency being unavailable.
class SectorSource {
 public:
  virtual ~SectorSource() = default;
  virtual double predict(const std::string& sector_id, pipeline::Target target, EpochSeconds bucket_start,
                         const metar::WeatherObservation& weather) = 0;
};

class InProcessSectorSource : public SectorSource {
 public:
  explicit InProcessSectorSource(const SectorService& service) : service_(service) {}
  double predict(const std::string& sector_id, pipeline::Target target, EpochSeconds bucket_start,
                 const metar::WeatherObservation& weather) override {
    return service_.predict_sector(sector_id, target, bucket_start, weather);
  }

 private:
  const SectorService& service_;
};

struct CapacityPrediction {
  std::string airport_id;
  EpochSeconds bucket_start = 0;
  double arrivals = 0.0;
  double departures = 0.0;
  std::string rc;
  bool degraded = false;
  std::vector<std::string> contributing_sectors;
};

struct RcTraining {
  ml::TrainedModel model;
  std::string model_id;       // empty when no store is attached
  double cv_accuracy = 0.0;   // 5-fold accuracy; 1.0 for a single-class history
};

struct AirportRow {
  EpochSeconds bucket_start = 0;
  double actual_arr = 0.0;
  double pred_arr = 0.0;
  double actual_dep = 0.0;
  double pred_dep = 0.0;
  bool degraded = false;
};

struct AirportEvaluation {
  std::string airport_id;
  std::vector<AirportRow> rows;
  std::vector<double> arrival_day_scores;
  std::vector<double> departure_day_scores;
  double mean_arrival_score = 0.0;
  double mean_departure_score = 0.0;
  eval::Histogram arrival_histogram;
  eval::Histogram departure_histogram;
};

class AirportService {
 public:
  static constexpr std::size_t kMinRcSamples = 50;

  AirportService(PlatformConfig config, SectorSource& sectors, store::Store* store = nullptr);

  /// Multinomial logistic regression on the runway-configuration features.
  /// Throws Error{NoTopology, InsufficientData}. A single-class history
  /// yields a constant classifier with `single_class` set.
  RcTraining train_rc_classifier(const std::string& airport_id,
                                 const std::vector<std::pair<metar::WeatherObservation, std::string>>& history,
                                 const ml::Hyper& hyper = {});
  void install_classifier(const std::string& airport_id, ml::TrainedModel model);
  std::size_t load_published();
  bool has_classifier(const std::string& airport_id) const;

  /// Throws Error{NoClassifier}.
  std::string predict_rc(const std::string& airport_id, const metar::WeatherObservation& weather) const;

  /// Sums sector exit (arrival) and entry (departure) predictions over the
  /// runway configuration's deduplicated sector sets. Any sector failure, or a
  /// closed health gate, yields the static table for the predicted RC with
  /// degraded set. Throws Error{NoTopology, NoClassifier}.
  CapacityPrediction predict_capacity(const std::string& airport_id, EpochSeconds bucket_start,
                                      const metar::WeatherObservation& weather) const;

  /// Called before each sector request; returning false skips the sector
  /// source and answers from the static table.
  void set_health_gate(std::function<bool()> gate);

  /// Compares predictions with ARRIVAL/DEPARTURE counts of prepared days.
  /// Throws Error{EmptyRange, NoTopology, NotPrepared, NoWeather}.
  AirportEvaluation evaluate_airport(const std::string& airport_id, const DateRange& range,
                                     int histogram_bins = 10) const;

  const PlatformConfig& config() const { return config_; }

 private:
  const AirportTopology& topology(const std::string& airport_id) const;
  std::shared_ptr<const ml::TrainedModel> classifier(const std::string& airport_id) const;

  PlatformConfig config_;
  SectorSource& sectors_;
  store::Store* store_;
  mutable std::mutex mu_;
  std::shared_ptr<const std::map<std::string, std::shared_ptr<const ml::TrainedModel>>> classifiers_;
  std::shared_ptr<const std::function<bool()>> gate_;
};

/// Pairs each runway-configuration record with the latest observation of the
/// airport's station at or before it. Throws Error{NoTopology}.
std::vector<std::pair<metar::WeatherObservation, std::string>> rc_history(const store::Store& store,
                                                                          const PlatformConfig& config,
                                                                          const std::string& airport_id,
                                                                          const DateRange& range);

/// Header `bucket_start,actual_arr,pred_arr,actual_dep,pred_dep`.
std::string airport_timeseries_csv(const AirportEvaluation& ev);

}  // namespace aeroflow::services
