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

#include "aeroflow/store/event.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aeroflow/core/error.hpp"

namespace aeroflow::store {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::SectorEntry: return "SECTOR_ENTRY";
    case EventKind::SectorExit: return "SECTOR_EXIT";
    case EventKind::Departure: return "DEPARTURE";
    case EventKind::Arrival: return "ARRIVAL";
  }
  return "SECTOR_ENTRY";
}

EventKind parse_event_kind(std::string_view s) {
  if (s == "SECTOR_ENTRY") return EventKind::SectorEntry;
  if (s == "SECTOR_EXIT") return EventKind::SectorExit;
  if (s == "DEPARTURE") return EventKind::Departure;
  if (s == "ARRIVAL") return EventKind::Arrival;
  throw Error(ErrorCode::FormatError, "unknown event kind '" + std::string(s) + "'");
}

EpochSeconds FlightEvent::timestamp_for(int order) const {
  for (const auto& c : candidates) {
    if (c.order == order) return c.ts;
  }
  return timestamp;
}

void validate_event(const FlightEvent& e) {
  if (e.flight_id.empty()) throw Error(ErrorCode::ValidationError, "empty flight id");
  if (e.resource_id.empty()) throw Error(ErrorCode::ValidationError, "empty resource id for flight " + e.flight_id);
  if (e.timestamp < 0) throw Error(ErrorCode::ValidationError, "negative timestamp for flight " + e.flight_id);
  const auto n = e.candidates.size();
  if (n != 0 && n != 2 && n != 3) {
    throw Error(ErrorCode::ValidationError,
                "flight " + e.flight_id + " carries " + std::to_string(n) + " candidates (allowed: 0, 2, 3)");
  }
  if (n != 0 && !e.ambiguity_group) {
    throw Error(ErrorCode::ValidationError, "candidates without ambiguity group for flight " + e.flight_id);
  }
  const Date day = date_of(e.timestamp);
  for (const auto& c : e.candidates) {
    if (c.order < 0 || c.order >= static_cast<int>(n)) {
      throw Error(ErrorCode::ValidationError, "candidate order out of range for flight " + e.flight_id);
    }
    if (c.ts < 0 || date_of(c.ts) != day) {
      throw Error(ErrorCode::ValidationError, "candidate timestamp outside the event's day for flight " + e.flight_id);
    }
  }
}

std::string encode_event(const FlightEvent& e) {
  ordered_json j;
  j["fid"] = e.flight_id;
  j["kind"] = to_string(e.kind);
  j["res"] = e.resource_id;
  j["ts"] = e.timestamp;
  j["ag"] = e.ambiguity_group ? ordered_json(*e.ambiguity_group) : ordered_json(nullptr);
  ordered_json cand = ordered_json::array();
  for (const auto& c : e.candidates) cand.push_back(ordered_json::array({c.ts, c.order}));
  j["cand"] = std::move(cand);
  j["seq"] = e.source_seq;
  return j.dump();
}

FlightEvent decode_event(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::FormatError, std::string("invalid JSON: ") + ex.what());
  }
  try {
    if (!j.is_object()) throw Error(ErrorCode::FormatError, "record is not an object");
    FlightEvent e;
    e.flight_id = j.at("fid").get<std::string>();
    e.kind = parse_event_kind(j.at("kind").get<std::string>());
    e.resource_id = j.at("res").get<std::string>();
    const auto& ts = j.at("ts");
    if (!ts.is_number_integer()) throw Error(ErrorCode::FormatError, "ts must be integer epoch seconds");
    e.timestamp = ts.get<EpochSeconds>();
    const auto& ag = j.at("ag");
    if (!ag.is_null()) e.ambiguity_group = ag.get<std::string>();
    for (const auto& c : j.at("cand")) {
      if (!c.is_array() || c.size() != 2) throw Error(ErrorCode::FormatError, "candidate must be [ts, order]");
      e.candidates.push_back({c[0].get<EpochSeconds>(), c[1].get<int>()});
    }
    e.source_seq = j.at("seq").get<std::uint64_t>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::FormatError, std::string("bad event record: ") + ex.what());
  }
}

std::string event_file_name(Date d) { return "events-" + format_yyyymmdd(d) + ".jsonl"; }

void write_event_file(const std::filesystem::path& path, const std::vector<FlightEvent>& events) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& e : events) out << encode_event(e) << '\n';
  if (!out) throw Error(ErrorCode::FormatError, "cannot write " + path.string());
}

std::vector<FlightEvent> replay(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::vector<FlightEvent> events;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    ++line_no;
    std::size_t nl = text.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    std::string_view line(text.data() + pos, (terminated ? nl : text.size()) - pos);
    pos = terminated ? nl + 1 : text.size();
    if (line.empty()) continue;
    try {
      events.push_back(decode_event(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::FormatError, path.filename().string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return events;
}

}  // namespace aeroflow::store
