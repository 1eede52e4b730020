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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "aeroflow/core/time.hpp"
#include "aeroflow/metar/metar.hpp"
#include "aeroflow/services/topology.hpp"
#include "aeroflow/store/event.hpp"
#include "aeroflow/store/store.hpp"

namespace aeroflow::traffic {

/// Flights per hour: base * (1 + amplitude * sin(2*pi*hour/24 + phase)) * weekly[dow],
/// scaled by wind_factor while the reported wind exceeds wind_threshold_kt.
struct DemandProfile {
  double base_rate = 0.0;
  double amplitude = 0.0;
  double phase_rad = 0.0;
  std::array<double, 7> weekly{1, 1, 1, 1, 1, 1, 1};
  double wind_threshold_kt = 1e9;
  double wind_factor = 1.0;

  double rate_per_hour(EpochSeconds t, double wind_kt) const;
};

struct SectorScenario {
  std::string id;
  std::string station;
  DemandProfile demand;
};

/// AR(1) parameters of one station's weather. `*_ar` is the per-step
/// autocorrelation at the 30-minute cadence; `*_sd` the stationary spread.
struct StationWeather {
  std::string id;
  double temp_mean_c = 12.0;
  double temp_diurnal_c = 5.0;
  double temp_sd = 2.0;
  double temp_ar = 0.9;
  double spread_mean_c = 6.0;  // temperature minus dewpoint
  double spread_sd = 2.0;
  double wind_mean_kt = 10.0;
  double wind_sd = 5.0;
  double wind_ar = 0.9;
  double dir_step_deg = 20.0;
  double pressure_mean_hpa = 1015.0;
  double pressure_sd = 6.0;
  double pressure_ar = 0.95;
  double low_vis_prob = 0.03;
};

/// Runway-configuration rule: `west` iff 180 < wind_dir < 360 with a
/// directional (non-VRB) wind, else `east`; below `low_vis_m` the low
/// visibility configuration overrides both when one is named.
struct RcRule {
  std::string west = "WEST";
  std::string east = "EAST";
  std::string low_vis;
  int low_vis_m = 0;

  std::string apply(const metar::WeatherObservation& obs) const;
};

struct AirportScenario {
  services::AirportTopology topology;
  DemandProfile arrivals;
  DemandProfile departures;
  RcRule rc_rule;
};

struct Scenario {
  std::vector<StationWeather> stations;
  std::vector<SectorScenario> sectors;
  std::vector<AirportScenario> airports;
  double ambiguity_rate = 0.0;
  std::uint64_t seed = 0;
  double transit_median_min = 12.0;
  double transit_sigma_log = 0.4;
  /// Drop flights whose exit would fall after midnight, so every interval
  /// closes within its day.
  bool contain_in_day = false;

  /// Throws Error{InvalidScenario}.
  void validate() const;
  services::PlatformConfig platform() const;
  const StationWeather* find_station(const std::string& id) const;
};

/// Throws Error{InvalidScenario}.
Scenario scenario_from_yaml(const YAML::Node& node);
Scenario load_scenario(const std::filesystem::path& path);

struct DayOutput {
  std::vector<store::FlightEvent> events;  // timestamp order; source_seq = position
  std::vector<metar::WeatherObservation> weather;
  std::vector<store::RcRecord> rc_log;
};

/// Deterministic in (scenario, date): each day and each stream draws from its
/// own seed derived from the scenario seed, so days can be generated in any
/// order or concurrently.
DayOutput generate_day(const Scenario& scenario, Date date);

/// Writes events-YYYYMMDD.jsonl, metar-YYYYMMDD.txt and rc-YYYYMMDD.jsonl for
/// every day in range, plus topology.yaml.
void simulate(const Scenario& scenario, const DateRange& range, const std::filesystem::path& out_dir);

std::string metar_file_name(Date d);
std::string rc_file_name(Date d);

}  // namespace aeroflow::traffic
