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

#include "aeroflow/pipeline/prepare.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aeroflow/core/error.hpp"
#include "aeroflow/core/fileio.hpp"

namespace aeroflow::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kPiFile = "PI.csv";
constexpr const char* kAirportFile = "airports.csv";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int to_int(const std::string& s) {
  std::size_t used = 0;
  int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

fs::path require_prepared(const store::Store& store, Date date) {
  if (!store.is_prepared(date)) throw Error(ErrorCode::NotPrepared, format_date(date) + " has not been prepared");
  return store.prepared_dir(date);
}

std::string fi_name(std::size_t part) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "FI-%04zu.jsonl", part);
  return buf;
}

}  // namespace

std::string format_pi_csv(const std::map<std::string, SectorDay>& sectors) {
  std::string out = "sector,bucket_start,occupancy,entries,exits,alt1,alt2\n";
  for (const auto& [id, sd] : sectors) {
    for (std::size_t b = 0; b < sd.occupancy.size(); ++b) {
      const auto& o = sd.occupancy[b];
      const auto& f = sd.flows[b];
      out += id;
      out += ',';
      out += format_iso(o.bucket_start);
      out += ',' + std::to_string(o.count) + ',' + std::to_string(f.entries) + ',' + std::to_string(f.exits) + ',';
      if (!o.alt_counts.empty()) out += std::to_string(o.alt_counts[0]);
      out += ',';
      if (o.alt_counts.size() > 1) out += std::to_string(o.alt_counts[1]);
      out += '\n';
    }
  }
  return out;
}

std::map<std::string, SectorDay> parse_pi_csv(const std::string& text) {
  std::map<std::string, SectorDay> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (++line_no == 1 || line.empty()) continue;
    const auto f = split_csv(line);
    try {
      if (f.size() != 7) throw std::invalid_argument("field count");
      auto& sd = out[f[0]];
      const EpochSeconds t = parse_iso(f[1]);
      OccupancyBucket o{f[0], t, kBucketSeconds, to_int(f[2]), {}};
      if (!f[5].empty()) o.alt_counts.push_back(to_int(f[5]));
      if (!f[6].empty()) o.alt_counts.push_back(to_int(f[6]));
      sd.occupancy.push_back(std::move(o));
      sd.flows.push_back({f[0], t, to_int(f[3]), to_int(f[4])});
    } catch (const std::exception& e) {
      throw Error(ErrorCode::FormatError, "PI line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_prepared(const PreparedDay& day, const fs::path& dir) {
  // FI partitions of at most kFiPartitionSize intervals each.
  std::vector<std::string> fi_files;
  for (std::size_t part = 0; part * kFiPartitionSize < day.intervals.size() || part == 0; ++part) {
    std::string text;
    const std::size_t end = std::min(day.intervals.size(), (part + 1) * kFiPartitionSize);
    for (std::size_t i = part * kFiPartitionSize; i < end; ++i) {
      const auto& iv = day.intervals[i];
      ordered_json j;
      j["fid"] = iv.flight_id;
      j["sector"] = iv.sector;
      j["entry"] = iv.entry;
      j["exit"] = iv.exit;
      j["open"] = iv.open_end;
      j["ag"] = iv.group ? ordered_json(*iv.group) : ordered_json(nullptr);
      ordered_json alts = ordered_json::array();
      for (const auto& [a, b] : iv.alternatives) alts.push_back({a, b});
      j["alt"] = std::move(alts);
      text += j.dump();
      text += '\n';
    }
    fi_files.push_back(fi_name(part));
    write_atomic(dir / fi_files.back(), text);
  }

  ordered_json sa = ordered_json::object();
  for (const auto& [id, sd] : day.sectors) sa[id] = ordered_json::array();
  for (std::size_t i = 0; i < day.intervals.size(); ++i) sa[day.intervals[i].sector].push_back(i);
  write_atomic(dir / "SA.json", sa.dump() + "\n");

  write_atomic(dir / kPiFile, format_pi_csv(day.sectors));

  std::string ap = "airport,bucket_start,arrivals,departures\n";
  for (const auto& [id, buckets] : day.airports) {
    for (const auto& b : buckets) {
      ap += id + ',' + format_iso(b.bucket_start) + ',' + std::to_string(b.arrivals) + ',' +
            std::to_string(b.departures) + '\n';
    }
  }
  write_atomic(dir / kAirportFile, ap);

  // The manifest goes last: its presence marks the generation complete.
  const auto& r = day.report;
  ordered_json st;
  st["date"] = format_date(day.date);
  st["partition_size"] = kFiPartitionSize;
  st["fi_files"] = fi_files;
  st["intervals"] = r.intervals;
  st["sectors"] = ordered_json::array();
  for (const auto& [id, sd] : day.sectors) st["sectors"].push_back(id);
  st["airports"] = ordered_json::array();
  for (const auto& [id, v] : day.airports) st["airports"].push_back(id);
  st["report"] = {{"raw_events", r.raw_events},       {"duplicates", r.duplicates},
                  {"intervals", r.intervals},         {"open_intervals", r.open_intervals},
                  {"dropped_exits", r.dropped_exits}, {"ambiguous_groups", r.ambiguous_groups},
                  {"airport_events", r.airport_events}, {"other_day_events", r.other_day_events}};
  write_atomic(dir / "ST.json", st.dump(1) + "\n");
}

PrepReport prepare_day(store::Store& store, Date date) {
  if (!store.has_raw_day(date)) throw Error(ErrorCode::RawMissing, "no raw partition for " + format_date(date));
  const auto events = store.read_day(date);
  std::vector<std::string> sectors;
  std::vector<std::string> airports;
  if (store.has_platform()) {
    const auto cfg = store.platform();
    sectors = cfg.sector_ids();
    airports = cfg.airport_ids();
  }
  const PreparedDay day = prepare_events(events, date, sectors, airports);
  const auto gen = store.stage_prepared(date);
  write_prepared(day, gen);
  store.commit_prepared(date, gen);
  return day.report;
}

std::map<std::string, SectorDay> load_sector_days(const store::Store& store, Date date) {
  return parse_pi_csv(read_text(require_prepared(store, date) / kPiFile));
}

std::vector<OccupancyBucket> occupancy_counts(const store::Store& store, const std::string& sector_id, Date date) {
  auto days = load_sector_days(store, date);
  auto it = days.find(sector_id);
  if (it == days.end()) throw Error(ErrorCode::NotFound, "sector " + sector_id + " not in " + format_date(date));
  return std::move(it->second.occupancy);
}

std::vector<FlowBucket> flow_counts(const store::Store& store, const std::string& sector_id, Date date) {
  auto days = load_sector_days(store, date);
  auto it = days.find(sector_id);
  if (it == days.end()) throw Error(ErrorCode::NotFound, "sector " + sector_id + " not in " + format_date(date));
  return std::move(it->second.flows);
}

std::vector<AirportFlowBucket> airport_flows(const store::Store& store, const std::string& airport_id, Date date) {
  std::istringstream in(read_text(require_prepared(store, date) / kAirportFile));
  std::string line;
  std::vector<AirportFlowBucket> out;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto f = split_csv(line);
    if (f.size() != 4 || f[0] != airport_id) continue;
    out.push_back({f[0], parse_iso(f[1]), to_int(f[2]), to_int(f[3])});
  }
  if (out.empty()) throw Error(ErrorCode::NotFound, "airport " + airport_id + " not in " + format_date(date));
  return out;
}

std::vector<Interval> load_intervals(const store::Store& store, Date date) {
  const auto dir = require_prepared(store, date);
  const auto st = nlohmann::json::parse(read_text(dir / "ST.json"));
  std::vector<Interval> out;
  for (const auto& name : st.at("fi_files")) {
    for (const auto& line : read_complete_lines(dir / name.get<std::string>())) {
      const auto j = nlohmann::json::parse(line);
      Interval iv;
      iv.flight_id = j.at("fid").get<std::string>();
      iv.sector = j.at("sector").get<std::string>();
      iv.entry = j.at("entry").get<EpochSeconds>();
      iv.exit = j.at("exit").get<EpochSeconds>();
      iv.open_end = j.at("open").get<bool>();
      if (!j.at("ag").is_null()) iv.group = j.at("ag").get<std::string>();
      for (const auto& a : j.at("alt")) iv.alternatives.emplace_back(a[0].get<EpochSeconds>(), a[1].get<EpochSeconds>());
      out.push_back(std::move(iv));
    }
  }
  return out;
}

}  // namespace aeroflow::pipeline
