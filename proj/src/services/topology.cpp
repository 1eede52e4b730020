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

#include "aeroflow/services/topology.hpp"

#include <algorithm>
#include <fstream>

#include "aeroflow/core/error.hpp"

namespace aeroflow::services {

namespace {

RunwaySense parse_sense(const std::string& s) {
  if (s == "arrivals") return RunwaySense::Arrivals;
  if (s == "departures") return RunwaySense::Departures;
  if (s == "both") return RunwaySense::Both;
  throw Error(ErrorCode::BadConfig, "unknown runway sense '" + s + "'");
}

const char* sense_name(RunwaySense s) {
  switch (s) {
    case RunwaySense::Arrivals: return "arrivals";
    case RunwaySense::Departures: return "departures";
    case RunwaySense::Both: return "both";
  }
  return "both";
}

std::vector<std::string> string_list(const YAML::Node& n) {
  std::vector<std::string> out;
  if (!n) return out;
  for (const auto& item : n) out.push_back(item.as<std::string>());
  return out;
}

}  // namespace

bool RunwayConfig::arrivals_on(const std::string& runway) const {
  auto it = active.find(runway);
  return it != active.end() && it->second != RunwaySense::Departures;
}

bool RunwayConfig::departures_on(const std::string& runway) const {
  auto it = active.find(runway);
  return it != active.end() && it->second != RunwaySense::Arrivals;
}

const RunwayConfig& AirportTopology::config(const std::string& id) const {
  for (const auto& c : configs) {
    if (c.config_id == id) return c;
  }
  throw Error(ErrorCode::BadConfig, "airport " + airport_id + " has no runway config '" + id + "'");
}

std::vector<std::string> AirportTopology::config_ids() const {
  std::vector<std::string> ids;
  for (const auto& c : configs) ids.push_back(c.config_id);
  return ids;
}

std::set<std::string> AirportTopology::arrival_sectors(const RunwayConfig& rc) const {
  std::set<std::string> out;
  for (const auto& r : runways) {
    if (rc.arrivals_on(r.id)) out.insert(r.arrival_sectors.begin(), r.arrival_sectors.end());
  }
  return out;
}

std::set<std::string> AirportTopology::departure_sectors(const RunwayConfig& rc) const {
  std::set<std::string> out;
  for (const auto& r : runways) {
    if (rc.departures_on(r.id)) out.insert(r.departure_sectors.begin(), r.departure_sectors.end());
  }
  return out;
}

std::set<std::string> AirportTopology::all_sectors() const {
  std::set<std::string> out;
  for (const auto& r : runways) {
    out.insert(r.arrival_sectors.begin(), r.arrival_sectors.end());
    out.insert(r.departure_sectors.begin(), r.departure_sectors.end());
  }
  return out;
}

const SectorInfo* PlatformConfig::find_sector(const std::string& id) const {
  for (const auto& s : sectors) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const AirportTopology* PlatformConfig::find_airport(const std::string& id) const {
  for (const auto& a : airports) {
    if (a.airport_id == id) return &a;
  }
  return nullptr;
}

std::vector<std::string> PlatformConfig::sector_ids() const {
  std::vector<std::string> ids;
  for (const auto& s : sectors) ids.push_back(s.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::string> PlatformConfig::airport_ids() const {
  std::vector<std::string> ids;
  for (const auto& a : airports) ids.push_back(a.airport_id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::set<std::string> PlatformConfig::stations() const {
  std::set<std::string> out;
  for (const auto& s : sectors) out.insert(s.station);
  for (const auto& a : airports) out.insert(a.station);
  return out;
}

void PlatformConfig::validate() const {
  std::set<std::string> ids;
  for (const auto& s : sectors) {
    if (s.id.empty() || s.station.empty()) throw Error(ErrorCode::BadConfig, "sector needs id and station");
    if (!ids.insert(s.id).second) throw Error(ErrorCode::BadConfig, "duplicate sector '" + s.id + "'");
  }
  for (const auto& a : airports) {
    if (a.runways.empty()) throw Error(ErrorCode::BadConfig, "airport " + a.airport_id + " has no runways");
    std::set<std::string> runway_ids;
    for (const auto& r : a.runways) {
      runway_ids.insert(r.id);
      if (r.arrival_sectors.empty() || r.departure_sectors.empty()) {
        throw Error(ErrorCode::BadConfig, "runway " + r.id + " needs arrival and departure sectors");
      }
      for (const auto& s : r.arrival_sectors) {
        if (!ids.count(s)) throw Error(ErrorCode::BadConfig, "runway " + r.id + " references unknown sector " + s);
      }
      for (const auto& s : r.departure_sectors) {
        if (!ids.count(s)) throw Error(ErrorCode::BadConfig, "runway " + r.id + " references unknown sector " + s);
      }
    }
    std::set<std::string> cfg_ids;
    for (const auto& c : a.configs) {
      if (!cfg_ids.insert(c.config_id).second) {
        throw Error(ErrorCode::BadConfig, "duplicate runway config '" + c.config_id + "'");
      }
      if (c.active.empty()) throw Error(ErrorCode::BadConfig, "runway config " + c.config_id + " has no active runway");
      for (const auto& [rw, sense] : c.active) {
        if (!runway_ids.count(rw)) throw Error(ErrorCode::BadConfig, "config " + c.config_id + " names unknown runway " + rw);
      }
      if (!a.static_capacity.count(c.config_id)) {
        throw Error(ErrorCode::BadConfig, "no static capacity for config " + c.config_id);
      }
    }
    if (a.configs.empty()) throw Error(ErrorCode::BadConfig, "airport " + a.airport_id + " has no runway configs");
  }
}

PlatformConfig platform_from_yaml(const YAML::Node& node) {
  PlatformConfig cfg;
  try {
    for (const auto& s : node["sectors"]) {
      cfg.sectors.push_back({s["id"].as<std::string>(), s["station"].as<std::string>()});
    }
    if (node["airports"]) {
      for (const auto& a : node["airports"]) {
        AirportTopology t;
        t.airport_id = a["id"].as<std::string>();
        t.station = a["station"].as<std::string>();
        for (const auto& r : a["runways"]) {
          t.runways.push_back(
              {r["id"].as<std::string>(), string_list(r["arrival_sectors"]), string_list(r["departure_sectors"])});
        }
        for (const auto& c : a["configs"]) {
          RunwayConfig rc;
          rc.config_id = c["id"].as<std::string>();
          for (const auto& kv : c["runways"]) {
            rc.active[kv.first.as<std::string>()] = parse_sense(kv.second.as<std::string>());
          }
          t.configs.push_back(std::move(rc));
        }
        std::sort(t.configs.begin(), t.configs.end(),
                  [](const RunwayConfig& x, const RunwayConfig& y) { return x.config_id < y.config_id; });
        for (const auto& kv : a["static_capacity"]) {
          t.static_capacity[kv.first.as<std::string>()] = {kv.second["arrivals"].as<double>(),
                                                           kv.second["departures"].as<double>()};
        }
        cfg.airports.push_back(std::move(t));
      }
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("topology: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

YAML::Node platform_to_yaml(const PlatformConfig& cfg) {
  YAML::Node root;
  YAML::Node sectors(YAML::NodeType::Sequence);
  for (const auto& s : cfg.sectors) {
    YAML::Node n;
    n["id"] = s.id;
    n["station"] = s.station;
    sectors.push_back(n);
  }
  root["sectors"] = sectors;
  YAML::Node airports(YAML::NodeType::Sequence);
  for (const auto& a : cfg.airports) {
    YAML::Node n;
    n["id"] = a.airport_id;
    n["station"] = a.station;
    for (const auto& r : a.runways) {
      YAML::Node rn;
      rn["id"] = r.id;
      rn["arrival_sectors"] = r.arrival_sectors;
      rn["departure_sectors"] = r.departure_sectors;
      n["runways"].push_back(rn);
    }
    for (const auto& c : a.configs) {
      YAML::Node cn;
      cn["id"] = c.config_id;
      for (const auto& [rw, sense] : c.active) cn["runways"][rw] = sense_name(sense);
      n["configs"].push_back(cn);
    }
    for (const auto& [id, cap] : a.static_capacity) {
      n["static_capacity"][id]["arrivals"] = cap.arrivals;
      n["static_capacity"][id]["departures"] = cap.departures;
    }
    airports.push_back(n);
  }
  root["airports"] = airports;
  return root;
}

PlatformConfig load_platform(const std::string& path) {
  YAML::Node node;
  try {
    node = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::BadConfig, "cannot read " + path + ": " + e.what());
  }
  return platform_from_yaml(node);
}

void save_platform(const PlatformConfig& cfg, const std::string& path) {
  YAML::Emitter out;
  out << platform_to_yaml(cfg);
  std::ofstream f(path, std::ios::trunc);
  f << out.c_str() << '\n';
  if (!f) throw Error(ErrorCode::BadConfig, "cannot write " + path);
}

}  // namespace aeroflow::services
