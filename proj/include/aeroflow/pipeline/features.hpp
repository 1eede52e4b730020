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

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aeroflow/core/time.hpp"
#include "aeroflow/metar/metar.hpp"
#include "aeroflow/pipeline/buckets.hpp"
#include "aeroflow/pipeline/dataset.hpp"
#include "aeroflow/store/store.hpp"

namespace aeroflow::pipeline {

inline constexpr std::size_t kFeatureCount = 13;
inline constexpr EpochSeconds kStaleAfter = 2 * 3600;
inline constexpr EpochSeconds kWeatherHorizon = 24 * 3600;

/// hour_sin, hour_cos, dow, doy_sin, doy_cos, temp_c, wind_speed_kt,
/// wind_dir_sin, wind_dir_cos, wind_dir_valid, humidity_pct, pressure_hpa,
/// weather_stale.
const std::vector<std::string>& feature_names();

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  bool stale = false;

  std::span<const double> span() const { return values; }
};

/// Observations per station, kept sorted by time.
class WeatherSource {
 public:
  /// Observations must carry obs_time.
  void add(const metar::WeatherObservation& obs);
  void add(const std::vector<metar::WeatherObservation>& obs);

  /// Latest observation at or before `t`, or nullptr.
  const metar::WeatherObservation* latest(const std::string& station, EpochSeconds t) const;
  bool has_station(const std::string& station) const { return by_station_.count(station) > 0; }

 private:
  std::map<std::string, std::vector<metar::WeatherObservation>> by_station_;
};

/// Features for the bucket starting at `bucket_start`, using the station's
/// latest observation at or before it. Throws Error{NoWeather} when there is
/// none within 24 hours.
FeatureVector build_features(EpochSeconds bucket_start, const WeatherSource& weather, const std::string& station);
/// Features from an explicitly supplied observation (a forecast for future
/// buckets). Staleness uses obs_time when it precedes the bucket.
FeatureVector build_features(EpochSeconds bucket_start, const metar::WeatherObservation& obs);

enum class Target { Occupancy, Entries, Exits };
std::string_view to_string(Target t) noexcept;
/// Throws Error{BadConfig}.
Target parse_target(std::string_view s);

struct TrainingSet {
  Dataset data;
  std::vector<EpochSeconds> bucket_starts;  // per row
  std::size_t excluded = 0;                 // rows dropped for missing weather
};

/// One row per bucket per day. Alternative targets come from the occupancy
/// alt counts and are only attached for the occupancy target.
TrainingSet assemble_training_set(const std::vector<std::pair<Date, SectorDay>>& days, Target target,
                                  const WeatherSource& weather, const std::string& station);

/// Store-backed: every day in range must be prepared. Throws
/// Error{EmptyRange, NotPrepared, NotFound}.
TrainingSet build_training_set(const store::Store& store, const std::string& sector_id, Target target,
                               const DateRange& range);

/// Weather for `range` plus the day before, so early buckets find an
/// observation.
WeatherSource load_weather(const store::Store& store, const DateRange& range);

/// Inputs of the runway-configuration classifier: wind_dir_sin, wind_dir_cos,
/// wind_speed_kt, visibility_m, pressure_hpa.
const std::vector<std::string>& rc_feature_names();
std::vector<double> rc_features(const metar::WeatherObservation& obs);

}  // namespace aeroflow::pipeline
