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

#include "support.hpp"

#include <atomic>
#include <cmath>
#include <chrono>
#include <unistd.h>

#include "aeroflow/core/error.hpp"
#include "aeroflow/metar/metar.hpp"
#include "aeroflow/ml/model.hpp"
#include "aeroflow/pipeline/prepare.hpp"
#include "aeroflow/services/sector_service.hpp"

namespace aeroflow::testing {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = std::filesystem::temp_directory_path() /
          (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path source_path(const std::string& relative) {
  return std::filesystem::path(AEROFLOW_SOURCE_DIR) / relative;
}

store::FlightEvent event(const std::string& flight, store::EventKind kind, const std::string& resource,
                         EpochSeconds ts, std::uint64_t seq) {
  store::FlightEvent e;
  e.flight_id = flight;
  e.kind = kind;
  e.resource_id = resource;
  e.timestamp = ts;
  e.source_seq = seq;
  return e;
}

metar::WeatherObservation observation(const std::string& station, EpochSeconds t, int wind_dir, double wind_kt,
                                      int visibility_m) {
  metar::WeatherObservation o;
  o.station = station;
  const Date d = date_of(t);
  const EpochSeconds in_day = t - day_start(d);
  o.day = static_cast<int>(static_cast<unsigned>(d.day()));
  o.hour = static_cast<int>(in_day / 3600);
  o.minute = static_cast<int>(in_day % 3600 / 60);
  o.obs_time = t;
  o.wind_dir_deg = wind_dir;
  o.wind_speed_kt = wind_kt;
  o.reported_speed = static_cast<int>(wind_kt);
  o.visibility_m = visibility_m;
  o.temp_c = 15;
  o.dewpoint_c = 8;
  o.humidity_pct = metar::relative_humidity(15, 8);
  o.pressure_hpa = 1013.0;
  o.reported_pressure = 1013;
  return o;
}

double TableSectorSource::predict(const std::string& sector_id, pipeline::Target target, EpochSeconds,
                                  const metar::WeatherObservation&) {
  ++calls;
  if (down) throw Error(ErrorCode::NoPredictor, "sector source withheld");
  auto it = values.find({sector_id, target});
  if (it == values.end()) throw Error(ErrorCode::NoPredictor, sector_id);
  return it->second;
}

ml::TrainedModel constant_classifier(const std::string& rc) {
  pipeline::Dataset d;
  d.feature_names = pipeline::rc_feature_names();
  d.cols = d.feature_names.size();
  const std::vector<double> x(d.cols, 0.0);
  for (int i = 0; i < 3; ++i) d.add_row(x, 0.0);
  return ml::train_classifier(d, std::vector<std::string>(3, rc));
}

CompositionCase random_composition_case(Rng& rng) {
  CompositionCase c;
  const auto n_sectors = 1 + rng.below(12);
  for (std::uint64_t s = 0; s < n_sectors; ++s) {
    c.platform.sectors.push_back({"X" + std::to_string(s), "EDDF"});
  }
  services::AirportTopology topo;
  topo.airport_id = "APT";
  topo.station = "EDDF";
  const auto n_runways = 1 + rng.below(4);
  auto pick = [&]() {
    std::vector<std::string> v;
    const auto n = 1 + rng.below(4);
    for (std::uint64_t k = 0; k < n; ++k) v.push_back(c.platform.sectors[rng.below(n_sectors)].id);  // repeats allowed
    return v;
  };
  for (std::uint64_t r = 0; r < n_runways; ++r) topo.runways.push_back({"R" + std::to_string(r), pick(), pick()});
  const auto n_configs = 1 + rng.below(3);
  for (std::uint64_t k = 0; k < n_configs; ++k) {
    services::RunwayConfig rc;
    rc.config_id = "C" + std::to_string(k);
    for (const auto& rw : topo.runways) {
      switch (rng.below(4)) {
        case 0: rc.active[rw.id] = services::RunwaySense::Arrivals; break;
        case 1: rc.active[rw.id] = services::RunwaySense::Departures; break;
        case 2: rc.active[rw.id] = services::RunwaySense::Both; break;
        default: break;
      }
    }
    if (rc.active.empty()) rc.active[topo.runways.front().id] = services::RunwaySense::Both;
    topo.static_capacity[rc.config_id] = {rng.uniform(0, 40), rng.uniform(0, 40)};
    topo.configs.push_back(std::move(rc));
  }
  c.rc = topo.configs[rng.below(topo.configs.size())].config_id;
  c.airport = topo.airport_id;
  c.platform.airports.push_back(std::move(topo));
  for (const auto& s : c.platform.sectors) {
    // Mix of magnitudes so summation order matters in floating point.
    c.values[{s.id, pipeline::Target::Exits}] = rng.uniform(0, 1) * std::pow(10.0, rng.uniform(-3, 3));
    c.values[{s.id, pipeline::Target::Entries}] = rng.uniform(0, 1) * std::pow(10.0, rng.uniform(-3, 3));
  }
  return c;
}

void load_days(store::Store& store, const traffic::Scenario& scenario, const DateRange& range) {
  store.put_platform(scenario.platform());
  for (const Date d : range.days()) {
    const auto out = traffic::generate_day(scenario, d);
    store.append_raw_batch(out.events);
    store.append_weather(out.weather);
    store.append_rc(out.rc_log);
    pipeline::prepare_day(store, d);
  }
}

std::vector<eval::Candidate> light_candidates() {
  auto c = eval::default_candidates();
  for (auto& x : c) x.hyper.gbm_rounds = 40;
  return c;
}

void train_all(store::Store& store, const DateRange& range) {
  const auto cfg = store.platform();
  services::SectorService sectors(cfg, &store, {5, 0}, light_candidates());
  for (const auto& s : cfg.sectors) sectors.train_sector(s.id, pipeline::Target::Occupancy, range);
  TableSectorSource none;
  services::AirportService airports(cfg, none, &store);
  for (const auto& a : cfg.airports) {
    std::set<std::string> exits;
    std::set<std::string> entries;
    for (const auto& r : a.runways) {
      exits.insert(r.arrival_sectors.begin(), r.arrival_sectors.end());
      entries.insert(r.departure_sectors.begin(), r.departure_sectors.end());
    }
    for (const auto& s : exits) sectors.train_sector(s, pipeline::Target::Exits, range);
    for (const auto& s : entries) sectors.train_sector(s, pipeline::Target::Entries, range);
    airports.train_rc_classifier(a.airport_id, services::rc_history(store, cfg, a.airport_id, range));
  }
}

}  // namespace aeroflow::testing
