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

#include "aeroflow/pipeline/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aeroflow/core/error.hpp"
#include "aeroflow/pipeline/prepare.hpp"

namespace aeroflow::pipeline {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double deg_to_rad(int deg) { return static_cast<double>(deg) * std::numbers::pi / 180.0; }

}  // namespace

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names{
      "hour_sin",    "hour_cos",    "dow",        "doy_sin",        "doy_cos",      "temp_c",       "wind_speed_kt",
      "wind_dir_sin", "wind_dir_cos", "wind_dir_valid", "humidity_pct", "pressure_hpa", "weather_stale"};
  return names;
}

void WeatherSource::add(const metar::WeatherObservation& obs) {
  if (!obs.obs_time) throw Error(ErrorCode::NoWeather, "observation from " + obs.station + " has no resolved time");
  auto& v = by_station_[obs.station];
  auto pos = std::upper_bound(v.begin(), v.end(), *obs.obs_time,
                              [](EpochSeconds t, const metar::WeatherObservation& o) { return t < *o.obs_time; });
  v.insert(pos, obs);
}

void WeatherSource::add(const std::vector<metar::WeatherObservation>& obs) {
  for (const auto& o : obs) add(o);
}

const metar::WeatherObservation* WeatherSource::latest(const std::string& station, EpochSeconds t) const {
  auto it = by_station_.find(station);
  if (it == by_station_.end()) return nullptr;
  const auto& v = it->second;
  auto pos = std::upper_bound(v.begin(), v.end(), t,
                              [](EpochSeconds x, const metar::WeatherObservation& o) { return x < *o.obs_time; });
  if (pos == v.begin()) return nullptr;
  return &*std::prev(pos);
}

FeatureVector build_features(EpochSeconds bucket_start, const metar::WeatherObservation& obs) {
  FeatureVector f;
  const EpochSeconds sod = ((bucket_start % kSecondsPerDay) + kSecondsPerDay) % kSecondsPerDay;
  const double hour = static_cast<double>(sod) / 3600.0;
  const Date d = date_of(bucket_start);
  const double doy_angle = kTwoPi * static_cast<double>(day_of_year(d) - 1) /
                           static_cast<double>(days_in_year(static_cast<int>(d.year())));
  const double dir = obs.wind_variable ? 0.0 : deg_to_rad(obs.wind_dir_deg);
  f.stale = obs.obs_time && *obs.obs_time <= bucket_start && bucket_start - *obs.obs_time > kStaleAfter;
  f.values = {std::sin(kTwoPi * hour / 24.0),
              std::cos(kTwoPi * hour / 24.0),
              static_cast<double>(day_of_week(d)),
              std::sin(doy_angle),
              std::cos(doy_angle),
              static_cast<double>(obs.temp_c),
              obs.wind_speed_kt,
              std::sin(dir),
              std::cos(dir),
              obs.wind_variable ? 0.0 : 1.0,
              obs.humidity_pct,
              obs.pressure_hpa,
              f.stale ? 1.0 : 0.0};
  return f;
}

FeatureVector build_features(EpochSeconds bucket_start, const WeatherSource& weather, const std::string& station) {
  const auto* obs = weather.latest(station, bucket_start);
  if (obs == nullptr || bucket_start - *obs->obs_time > kWeatherHorizon) {
    throw Error(ErrorCode::NoWeather, "no observation from " + station + " within 24 h before " + format_iso(bucket_start));
  }
  return build_features(bucket_start, *obs);
}

std::string_view to_string(Target t) noexcept {
  switch (t) {
    case Target::Occupancy: return "occupancy";
    case Target::Entries: return "entries";
    case Target::Exits: return "exits";
  }
  return "?";
}

Target parse_target(std::string_view s) {
  if (s == "occupancy") return Target::Occupancy;
  if (s == "entries") return Target::Entries;
  if (s == "exits") return Target::Exits;
  throw Error(ErrorCode::BadConfig, "unknown target '" + std::string(s) + "' (occupancy|entries|exits)");
}

TrainingSet assemble_training_set(const std::vector<std::pair<Date, SectorDay>>& days, Target target,
                                  const WeatherSource& weather, const std::string& station) {
  TrainingSet ts;
  ts.data.feature_names = feature_names();
  ts.data.cols = kFeatureCount;
  for (const auto& [date, sd] : days) {
    for (std::size_t b = 0; b < sd.occupancy.size(); ++b) {
      const auto& occ = sd.occupancy[b];
      FeatureVector f;
      try {
        f = build_features(occ.bucket_start, weather, station);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoWeather) throw;
        ++ts.excluded;
        continue;
      }
      double y = 0.0;
      std::vector<double> alts;
      switch (target) {
        case Target::Occupancy:
          y = occ.count;
          for (int a : occ.alt_counts) alts.push_back(a);
          break;
        case Target::Entries: y = sd.flows[b].entries; break;
        case Target::Exits: y = sd.flows[b].exits; break;
      }
      ts.data.add_row(f.span(), y, std::move(alts));
      ts.bucket_starts.push_back(occ.bucket_start);
    }
  }
  return ts;
}

WeatherSource load_weather(const store::Store& store, const DateRange& range) {
  WeatherSource ws;
  const Date before{std::chrono::sys_days(range.first) - std::chrono::days(1)};
  ws.add(store.read_weather(before));
  for (const Date d : range.days()) ws.add(store.read_weather(d));
  return ws;
}

TrainingSet build_training_set(const store::Store& store, const std::string& sector_id, Target target,
                               const DateRange& range) {
  if (range.last < range.first) throw Error(ErrorCode::EmptyRange, range.to_string());
  const auto cfg = store.platform();
  const auto* sector = cfg.find_sector(sector_id);
  if (sector == nullptr) throw Error(ErrorCode::NotFound, "unknown sector " + sector_id);
  std::vector<std::pair<Date, SectorDay>> days;
  for (const Date d : range.days()) {
    auto all = load_sector_days(store, d);
    auto it = all.find(sector_id);
    if (it == all.end()) throw Error(ErrorCode::NotFound, "sector " + sector_id + " not in " + format_date(d));
    days.emplace_back(d, std::move(it->second));
  }
  return assemble_training_set(days, target, load_weather(store, range), sector->station);
}

const std::vector<std::string>& rc_feature_names() {
  static const std::vector<std::string> names{"wind_dir_sin", "wind_dir_cos", "wind_speed_kt", "visibility_m",
                                              "pressure_hpa"};
  return names;
}

std::vector<double> rc_features(const metar::WeatherObservation& obs) {
  const double dir = obs.wind_variable ? 0.0 : deg_to_rad(obs.wind_dir_deg);
  return {std::sin(dir), std::cos(dir), obs.wind_speed_kt, static_cast<double>(obs.visibility_m), obs.pressure_hpa};
}

}  // namespace aeroflow::pipeline
