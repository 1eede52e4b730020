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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aeroflow/core/time.hpp"

namespace aeroflow::store {

enum class EventKind { SectorEntry, SectorExit, Departure, Arrival };

std::string_view to_string(EventKind kind) noexcept;
/// Throws Error{FormatError} for unknown names.
EventKind parse_event_kind(std::string_view s);

/// One alternative timestamp for an ambiguous event. `order` 0 is the primary
/// reading; orders 1 and 2 are the alternative orderings of the group.
struct Candidate {
  EpochSeconds ts = 0;
  int order = 0;

  bool operator==(const Candidate&) const = default;
};

struct FlightEvent {
  std::string flight_id;
  EventKind kind = EventKind::SectorEntry;
  std::string resource_id;
  EpochSeconds timestamp = 0;
  std::optional<std::string> ambiguity_group;
  std::vector<Candidate> candidates;  // empty, or 2-3 entries
  std::uint64_t source_seq = 0;

  bool operator==(const FlightEvent&) const = default;

  /// Timestamp under alternative ordering `order`; the primary timestamp when
  /// the event carries no candidate with that order.
  EpochSeconds timestamp_for(int order) const;
};

/// Field validation shared by the store and the replay reader. Throws
/// Error{ValidationError}.
void validate_event(const FlightEvent& e);

/// Interchange encoding: one compact JSON object, keys in the order
/// fid, kind, res, ts, ag, cand, seq. No trailing newline.
std::string encode_event(const FlightEvent& e);
/// Throws Error{FormatError}.
FlightEvent decode_event(std::string_view line);

std::string event_file_name(Date d);  // events-YYYYMMDD.jsonl

void write_event_file(const std::filesystem::path& path, const std::vector<FlightEvent>& events);

/// Replays an interchange file in file order. A malformed or truncated line
/// raises Error{FormatError} naming the 1-based line number.
std::vector<FlightEvent> replay(const std::filesystem::path& path);

}  // namespace aeroflow::store
