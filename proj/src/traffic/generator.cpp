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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>

#include <nlohmann/json.hpp>

#include "aeroflow/core/error.hpp"
#include "aeroflow/core/rng.hpp"
#include "aeroflow/traffic/scenario.hpp"

namespace aeroflow::traffic {

namespace {

using store::Candidate;
using store::EventKind;
using store::FlightEvent;

constexpr EpochSeconds kWeatherStep = 1800;
constexpr int kWeatherPerDay = 48;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Independent stream per (scenario seed, day, purpose).
Rng stream(std::uint64_t seed, Date date, std::string_view purpose) {
  const auto day = static_cast<std::uint64_t>(day_start(date) / kSecondsPerDay);
  return Rng(splitmix(splitmix(seed ^ splitmix(day)) ^ fnv1a(purpose)));
}

std::string two(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

std::vector<metar::WeatherObservation> station_day(const StationWeather& st, Date date, std::uint64_t seed) {
  Rng rng = stream(seed, date, "weather/" + st.id);
  const EpochSeconds t0 = day_start(date);
  // Start each day from the stationary distribution so days are independent.
  double temp_anom = rng.normal(0.0, st.temp_sd);
  double spread = rng.normal(st.spread_mean_c, st.spread_sd);
  double wind = rng.normal(st.wind_mean_kt, st.wind_sd);
  double pressure = rng.normal(st.pressure_mean_hpa, st.pressure_sd);
  double dir = rng.uniform(0.0, 360.0);

  std::vector<metar::WeatherObservation> out;
  out.reserve(kWeatherPerDay);
  const unsigned dom = static_cast<unsigned>(date.day());
  for (int k = 0; k < kWeatherPerDay; ++k) {
    if (k > 0) {
      auto step = [&](double x, double mean, double sd, double ar) {
        return mean + ar * (x - mean) + std::sqrt(1.0 - ar * ar) * sd * rng.normal();
      };
      temp_anom = step(temp_anom, 0.0, st.temp_sd, st.temp_ar);
      spread = step(spread, st.spread_mean_c, st.spread_sd, st.temp_ar);
      wind = step(wind, st.wind_mean_kt, st.wind_sd, st.wind_ar);
      pressure = step(pressure, st.pressure_mean_hpa, st.pressure_sd, st.pressure_ar);
      dir = std::fmod(dir + rng.normal(0.0, st.dir_step_deg) + 360.0, 360.0);
    }
    const bool low_vis = rng.uniform() < st.low_vis_prob;
    const int low_vis_m = 200 + 100 * static_cast<int>(rng.below(13));

    const double hour = static_cast<double>(k) / 2.0;
    int temp = static_cast<int>(std::lround(
        st.temp_mean_c + st.temp_diurnal_c * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0) + temp_anom));
    temp = std::clamp(temp, -59, 59);
    int dew = std::clamp(temp - static_cast<int>(std::lround(std::max(0.0, spread))), -59, temp);
    const int speed = std::clamp(static_cast<int>(std::lround(wind)), 0, 99);
    int dir10 = static_cast<int>(std::lround(dir / 10.0)) * 10;
    if (dir10 == 0) dir10 = 360;

    std::string wind_group;
    if (speed == 0) {
      wind_group = "00000KT";
    } else if (speed <= 2) {
      wind_group = "VRB" + two(speed) + "KT";
    } else {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%03d%02dKT", dir10, speed);
      wind_group = buf;
    }
    char vis[16];
    std::snprintf(vis, sizeof vis, "%04d", low_vis ? low_vis_m : 9999);
    auto temp_group = [](int t) { return t < 0 ? "M" + two(-t) : two(t); };
    char qnh[16];
    std::snprintf(qnh, sizeof qnh, "Q%04d", std::clamp(static_cast<int>(std::lround(pressure)), 900, 1080));

    const std::string body = st.id + " " + two(static_cast<int>(dom)) + two(k / 2) + (k % 2 ? "30" : "00") + "Z " +
                             wind_group + " " + vis + " " + temp_group(temp) + "/" + temp_group(dew) + " " + qnh;
    auto obs = metar::parse_metar(body);
    obs.obs_time = t0 + k * kWeatherStep;
    out.push_back(std::move(obs));
  }
  return out;
}

struct Builder {
  const Scenario& sc;
  Date date;
  EpochSeconds t0;
  EpochSeconds t_end;
  std::string day;
  std::vector<FlightEvent> events;

  EpochSeconds transit(Rng& rng) const {
    const double s = rng.lognormal(sc.transit_median_min * 60.0, sc.transit_sigma_log);
    return std::max<EpochSeconds>(60, static_cast<EpochSeconds>(std::llround(s)));
  }

  static FlightEvent make(const std::string& fid, EventKind kind, const std::string& res, EpochSeconds ts) {
    FlightEvent e;
    e.flight_id = fid;
    e.kind = kind;
    e.resource_id = res;
    e.timestamp = ts;
    return e;
  }

  // Emits the entry/exit pair, possibly as an ambiguity group whose candidate
  // readings shift both timestamps by up to ten minutes.
  void pair(Rng& rng, const std::string& fid, const std::string& sector, EpochSeconds entry, EpochSeconds exit) {
    FlightEvent in = make(fid, EventKind::SectorEntry, sector, entry);
    FlightEvent out = make(fid, EventKind::SectorExit, sector, exit);
    const bool ambiguous = rng.uniform() < sc.ambiguity_rate;
    const int n_cand = rng.uniform() < 0.5 ? 2 : 3;
    if (ambiguous) {
      in.ambiguity_group = out.ambiguity_group = "G-" + fid + "-" + sector;
      in.candidates.push_back({entry, 0});
      out.candidates.push_back({exit, 0});
      for (int k = 1; k < n_cand; ++k) {
        EpochSeconds a = std::clamp<EpochSeconds>(entry + static_cast<EpochSeconds>(rng.below(1201)) - 600, t0, t_end - 61);
        EpochSeconds b = std::clamp<EpochSeconds>(exit + static_cast<EpochSeconds>(rng.below(1201)) - 600, t0, t_end - 1);
        if (b <= a) b = a + 60;
        in.candidates.push_back({a, k});
        out.candidates.push_back({b, k});
      }
    }
    events.push_back(std::move(in));
    events.push_back(std::move(out));
  }
};

// Latest observation at or before t (observations sit on the half hour).
const metar::WeatherObservation& weather_at(const std::vector<metar::WeatherObservation>& wx, EpochSeconds offset) {
  return wx[static_cast<std::size_t>(offset / kWeatherStep)];
}

}  // namespace

DayOutput generate_day(const Scenario& sc, Date date) {
  sc.validate();
  DayOutput out;
  std::map<std::string, std::vector<metar::WeatherObservation>> wx;
  for (const auto& st : sc.stations) {
    auto series = station_day(st, date, sc.seed);
    out.weather.insert(out.weather.end(), series.begin(), series.end());
    wx.emplace(st.id, std::move(series));
  }

  Builder b{sc, date, day_start(date), day_start(date) + kSecondsPerDay, format_yyyymmdd(date), {}};
  char idbuf[64];

  for (const auto& sector : sc.sectors) {
    Rng rng = stream(sc.seed, date, "sector/" + sector.id);
    const auto& series = wx.at(sector.station);
    int n = 0;
    for (int bucket = 0; bucket < kBucketsPerDay; ++bucket) {
      const EpochSeconds start = b.t0 + bucket * kBucketSeconds;
      const double rate = sector.demand.rate_per_hour(start, weather_at(series, start - b.t0).wind_speed_kt);
      const auto count = rng.poisson(rate / 4.0);
      std::vector<EpochSeconds> entries(count);
      for (auto& t : entries) t = start + static_cast<EpochSeconds>(rng.below(kBucketSeconds));
      std::sort(entries.begin(), entries.end());
      for (EpochSeconds entry : entries) {
        std::snprintf(idbuf, sizeof idbuf, "%s-%s-%05d", sector.id.c_str(), b.day.c_str(), n++);
        const EpochSeconds exit = entry + b.transit(rng);
        if (exit < b.t_end) {
          b.pair(rng, idbuf, sector.id, entry, exit);
        } else if (!sc.contain_in_day) {
          b.events.push_back(Builder::make(idbuf, EventKind::SectorEntry, sector.id, entry));
        }
      }
    }
  }

  for (const auto& ap : sc.airports) {
    const auto& topo = ap.topology;
    const auto& series = wx.at(topo.station);
    for (const auto& obs : series) out.rc_log.push_back({topo.airport_id, *obs.obs_time, ap.rc_rule.apply(obs)});

    for (const bool arriving : {true, false}) {
      Rng rng = stream(sc.seed, date, "airport/" + topo.airport_id + (arriving ? "/arr" : "/dep"));
      const DemandProfile& demand = arriving ? ap.arrivals : ap.departures;
      int n = 0;
      for (int bucket = 0; bucket < kBucketsPerDay; ++bucket) {
        const EpochSeconds start = b.t0 + bucket * kBucketSeconds;
        const auto& obs = weather_at(series, start - b.t0);
        const auto& rc = topo.config(ap.rc_rule.apply(obs));
        const auto set = arriving ? topo.arrival_sectors(rc) : topo.departure_sectors(rc);
        const std::vector<std::string> sectors(set.begin(), set.end());
        const auto count = rng.poisson(demand.rate_per_hour(start, obs.wind_speed_kt) / 4.0);
        std::vector<EpochSeconds> times(count);
        for (auto& t : times) t = start + static_cast<EpochSeconds>(rng.below(kBucketSeconds));
        std::sort(times.begin(), times.end());
        for (EpochSeconds entry : times) {
          std::snprintf(idbuf, sizeof idbuf, "%s-%c-%s-%05d", topo.airport_id.c_str(), arriving ? 'A' : 'D',
                        b.day.c_str(), n++);
          const std::string sector = sectors.empty() ? std::string() : sectors[rng.below(sectors.size())];
          const EpochSeconds exit = entry + b.transit(rng);
          if (sector.empty()) continue;
          if (exit >= b.t_end) {
            if (sc.contain_in_day) continue;
            if (!arriving) b.events.push_back(Builder::make(idbuf, EventKind::Departure, topo.airport_id, entry));
            b.events.push_back(Builder::make(idbuf, EventKind::SectorEntry, sector, entry));
            continue;
          }
          if (!arriving) b.events.push_back(Builder::make(idbuf, EventKind::Departure, topo.airport_id, entry));
          b.pair(rng, idbuf, sector, entry, exit);
          if (arriving) b.events.push_back(Builder::make(idbuf, EventKind::Arrival, topo.airport_id, exit));
        }
      }
    }
  }

  std::stable_sort(b.events.begin(), b.events.end(),
                   [](const FlightEvent& x, const FlightEvent& y) { return x.timestamp < y.timestamp; });
  for (std::size_t i = 0; i < b.events.size(); ++i) b.events[i].source_seq = i;
  out.events = std::move(b.events);
  return out;
}

std::string metar_file_name(Date d) { return "metar-" + format_yyyymmdd(d) + ".txt"; }
std::string rc_file_name(Date d) { return "rc-" + format_yyyymmdd(d) + ".jsonl"; }

void simulate(const Scenario& scenario, const DateRange& range, const std::filesystem::path& out_dir) {
  scenario.validate();
  std::filesystem::create_directories(out_dir);
  services::save_platform(scenario.platform(), (out_dir / "topology.yaml").string());
  for (const Date d : range.days()) {
    const auto day = generate_day(scenario, d);
    store::write_event_file(out_dir / store::event_file_name(d), day.events);

    std::ofstream wx(out_dir / metar_file_name(d), std::ios::binary | std::ios::trunc);
    metar::FileContext ctx{static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                           scenario.stations.empty() ? std::string() : scenario.stations.front().id};
    wx << metar::format_context_line(ctx) << '\n';
    for (const auto& obs : day.weather) wx << obs.raw << '\n';
    if (!wx) throw Error(ErrorCode::FormatError, "cannot write weather for " + format_date(d));

    std::ofstream rc(out_dir / rc_file_name(d), std::ios::binary | std::ios::trunc);
    for (const auto& r : day.rc_log) {
      nlohmann::ordered_json j;
      j["airport"] = r.airport;
      j["ts"] = r.ts;
      j["rc"] = r.rc;
      rc << j.dump() << '\n';
    }
    if (!rc) throw Error(ErrorCode::FormatError, "cannot write runway log for " + format_date(d));
  }
}

}  // namespace aeroflow::traffic
