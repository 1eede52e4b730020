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

#include "aeroflow/traffic/scenario.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "aeroflow/core/error.hpp"

namespace aeroflow::traffic {

namespace {

template <typename T>
T get_or(const YAML::Node& node, const char* key, T fallback) {
  return node[key] ? node[key].as<T>() : fallback;
}

DemandProfile demand_from_yaml(const YAML::Node& n) {
  DemandProfile d;
  if (!n) return d;
  d.base_rate = get_or(n, "base_rate", 0.0);
  d.amplitude = get_or(n, "amplitude", 0.0);
  d.phase_rad = get_or(n, "phase_rad", 0.0);
  if (n["weekly"]) {
    if (n["weekly"].size() != 7) throw Error(ErrorCode::InvalidScenario, "weekly needs 7 multipliers (Mon..Sun)");
    for (std::size_t i = 0; i < 7; ++i) d.weekly[i] = n["weekly"][i].as<double>();
  }
  d.wind_threshold_kt = get_or(n, "wind_threshold_kt", 1e9);
  d.wind_factor = get_or(n, "wind_factor", 1.0);
  return d;
}

void check_demand(const DemandProfile& d, const std::string& who) {
  auto fail = [&](const std::string& why) { throw Error(ErrorCode::InvalidScenario, who + ": " + why); };
  if (!(d.base_rate >= 0.0) || !std::isfinite(d.base_rate)) fail("base_rate must be >= 0");
  if (!(d.amplitude >= 0.0 && d.amplitude <= 1.0)) fail("amplitude must lie in [0, 1]");
  if (!std::isfinite(d.phase_rad)) fail("phase must be finite");
  for (double w : d.weekly) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail("weekly multipliers must be >= 0");
  }
  if (!(d.wind_factor >= 0.0 && d.wind_factor <= 1.0)) fail("wind_factor must lie in [0, 1]");
}

}  // namespace

double DemandProfile::rate_per_hour(EpochSeconds t, double wind_kt) const {
  const double hour = static_cast<double>(t % kSecondsPerDay) / 3600.0;
  const int dow = day_of_week(date_of(t));
  double rate = base_rate * (1.0 + amplitude * std::sin(2.0 * std::numbers::pi * hour / 24.0 + phase_rad)) *
                weekly[static_cast<std::size_t>(dow)];
  if (wind_kt > wind_threshold_kt) rate *= wind_factor;
  return rate;
}

std::string RcRule::apply(const metar::WeatherObservation& obs) const {
  if (!low_vis.empty() && obs.visibility_m < low_vis_m) return low_vis;
  const bool westerly = !obs.wind_variable && obs.wind_dir_deg > 180 && obs.wind_dir_deg < 360;
  return westerly ? west : east;
}

const StationWeather* Scenario::find_station(const std::string& id) const {
  for (const auto& s : stations) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

services::PlatformConfig Scenario::platform() const {
  services::PlatformConfig cfg;
  for (const auto& s : sectors) cfg.sectors.push_back({s.id, s.station});
  for (const auto& a : airports) cfg.airports.push_back(a.topology);
  return cfg;
}

void Scenario::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidScenario, why); };
  if (!(ambiguity_rate >= 0.0 && ambiguity_rate <= 0.1)) fail("ambiguity_rate must lie in [0, 0.1]");
  if (!(transit_median_min > 0.0) || !(transit_sigma_log >= 0.0)) fail("transit median must be > 0 and sigma >= 0");
  std::set<std::string> station_ids;
  for (const auto& s : stations) {
    if (s.id.size() != 4) fail("station id '" + s.id + "' must have 4 letters");
    if (!station_ids.insert(s.id).second) fail("duplicate station " + s.id);
    for (double ar : {s.temp_ar, s.wind_ar, s.pressure_ar}) {
      if (!(ar >= 0.0 && ar < 1.0)) fail("station " + s.id + ": autocorrelation must lie in [0, 1)");
    }
    for (double sd : {s.temp_sd, s.spread_sd, s.wind_sd, s.pressure_sd, s.dir_step_deg}) {
      if (!(sd >= 0.0)) fail("station " + s.id + ": spreads must be >= 0");
    }
    if (!(s.low_vis_prob >= 0.0 && s.low_vis_prob <= 1.0)) fail("station " + s.id + ": low_vis_prob outside [0, 1]");
  }
  for (const auto& s : sectors) {
    if (!station_ids.count(s.station)) fail("sector " + s.id + " uses unknown station " + s.station);
    check_demand(s.demand, "sector " + s.id);
  }
  for (const auto& a : airports) {
    const auto& id = a.topology.airport_id;
    if (!station_ids.count(a.topology.station)) fail("airport " + id + " uses unknown station " + a.topology.station);
    check_demand(a.arrivals, "airport " + id + " arrivals");
    check_demand(a.departures, "airport " + id + " departures");
    const auto ids = a.topology.config_ids();
    for (const auto& name : {a.rc_rule.west, a.rc_rule.east}) {
      if (std::find(ids.begin(), ids.end(), name) == ids.end()) fail("airport " + id + ": rc rule names unknown config " + name);
    }
    if (!a.rc_rule.low_vis.empty() && std::find(ids.begin(), ids.end(), a.rc_rule.low_vis) == ids.end()) {
      fail("airport " + id + ": rc rule names unknown config " + a.rc_rule.low_vis);
    }
  }
  try {
    platform().validate();
  } catch (const Error& e) {
    fail(e.what());
  }
}

Scenario scenario_from_yaml(const YAML::Node& node) {
  Scenario sc;
  try {
    sc.seed = get_or<std::uint64_t>(node, "seed", 0);
    sc.ambiguity_rate = get_or(node, "ambiguity_rate", 0.0);
    sc.contain_in_day = get_or(node, "contain_in_day", false);
    if (const auto t = node["transit"]) {
      sc.transit_median_min = get_or(t, "median_min", 12.0);
      sc.transit_sigma_log = get_or(t, "sigma_log", 0.4);
    }
    for (const auto& s : node["stations"]) {
      StationWeather w;
      w.id = s["id"].as<std::string>();
      w.temp_mean_c = get_or(s, "temp_mean_c", w.temp_mean_c);
      w.temp_diurnal_c = get_or(s, "temp_diurnal_c", w.temp_diurnal_c);
      w.temp_sd = get_or(s, "temp_sd", w.temp_sd);
      w.temp_ar = get_or(s, "temp_ar", w.temp_ar);
      w.spread_mean_c = get_or(s, "spread_mean_c", w.spread_mean_c);
      w.spread_sd = get_or(s, "spread_sd", w.spread_sd);
      w.wind_mean_kt = get_or(s, "wind_mean_kt", w.wind_mean_kt);
      w.wind_sd = get_or(s, "wind_sd", w.wind_sd);
      w.wind_ar = get_or(s, "wind_ar", w.wind_ar);
      w.dir_step_deg = get_or(s, "dir_step_deg", w.dir_step_deg);
      w.pressure_mean_hpa = get_or(s, "pressure_mean_hpa", w.pressure_mean_hpa);
      w.pressure_sd = get_or(s, "pressure_sd", w.pressure_sd);
      w.pressure_ar = get_or(s, "pressure_ar", w.pressure_ar);
      w.low_vis_prob = get_or(s, "low_vis_prob", w.low_vis_prob);
      sc.stations.push_back(std::move(w));
    }
    for (const auto& s : node["sectors"]) {
      sc.sectors.push_back({s["id"].as<std::string>(), s["station"].as<std::string>(), demand_from_yaml(s)});
    }
    if (node["airports"]) {
      // Topology fields share the platform configuration schema.
      YAML::Node topo;
      topo["sectors"] = node["sectors"];
      topo["airports"] = node["airports"];
      const auto platform = services::platform_from_yaml(topo);
      std::size_t i = 0;
      for (const auto& a : node["airports"]) {
        AirportScenario as;
        as.topology = platform.airports[i++];
        as.arrivals = demand_from_yaml(a["arrivals"]);
        as.departures = demand_from_yaml(a["departures"]);
        if (const auto r = a["rc_rule"]) {
          as.rc_rule.west = get_or<std::string>(r, "west", "WEST");
          as.rc_rule.east = get_or<std::string>(r, "east", "EAST");
          if (const auto lv = r["low_visibility"]) {
            as.rc_rule.low_vis = lv["config"].as<std::string>();
            as.rc_rule.low_vis_m = lv["below_m"].as<int>();
          }
        }
        sc.airports.push_back(std::move(as));
      }
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidScenario, std::string("scenario: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidScenario) throw;
    throw Error(ErrorCode::InvalidScenario, e.what());
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  YAML::Node node;
  try {
    node = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidScenario, "cannot read " + path.string() + ": " + e.what());
  }
  return scenario_from_yaml(node);
}

}  // namespace aeroflow::traffic
