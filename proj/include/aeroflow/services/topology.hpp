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

#include <map>
#include <set>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

namespace aeroflow::services {

struct SectorInfo {
  std::string id;
  std::string station;  // weather station feeding this sector's features
};

enum class RunwaySense { Arrivals, Departures, Both };

struct RunwayConfig {
  std::string config_id;
  std::map<std::string, RunwaySense> active;  // runway id -> sense

  bool arrivals_on(const std::string& runway) const;
  bool departures_on(const std::string& runway) const;
};

struct Runway {
  std::string id;
  std::vector<std::string> arrival_sectors;
  std::vector<std::string> departure_sectors;
};

struct StaticCapacity {
  double arrivals = 0.0;
  double departures = 0.0;
};

struct AirportTopology {
  std::string airport_id;
  std::string station;
  std::vector<Runway> runways;
  std::vector<RunwayConfig> configs;                 // sorted by config_id
  std::map<std::string, StaticCapacity> static_capacity;  // per config_id

  const RunwayConfig& config(const std::string& id) const;
  std::vector<std::string> config_ids() const;
  /// Deduplicated, sorted union of arrival sectors of runways landing in `rc`.
  std::set<std::string> arrival_sectors(const RunwayConfig& rc) const;
  std::set<std::string> departure_sectors(const RunwayConfig& rc) const;
  std::set<std::string> all_sectors() const;
};

/// The static configuration tables the platform needs at prepare/train/serve
/// time: known sectors with their weather stations, and airport topologies.
struct PlatformConfig {
  std::vector<SectorInfo> sectors;
  std::vector<AirportTopology> airports;

  const SectorInfo* find_sector(const std::string& id) const;
  const AirportTopology* find_airport(const std::string& id) const;
  std::vector<std::string> sector_ids() const;
  std::vector<std::string> airport_ids() const;
  std::set<std::string> stations() const;

  /// Throws Error{BadConfig} on dangling sector references, empty sector
  /// lists, duplicate config ids or a config without active runways.
  void validate() const;
};

PlatformConfig platform_from_yaml(const YAML::Node& node);
YAML::Node platform_to_yaml(const PlatformConfig& cfg);
PlatformConfig load_platform(const std::string& path);
void save_platform(const PlatformConfig& cfg, const std::string& path);

}  // namespace aeroflow::services
