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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aeroflow/core/time.hpp"
#include "aeroflow/store/event.hpp"

namespace aeroflow::pipeline {

/// Reconciled presence of one flight in one sector, half-open [entry, exit).
/// `alternatives[k-1]` is the interval under alternative reading k of its
/// ambiguity group.
struct Interval {
  std::string flight_id;
  std::string sector;
  EpochSeconds entry = 0;
  EpochSeconds exit = 0;
  bool open_end = false;  // no exit seen; extended to the end of the day
  std::optional<std::string> group;
  std::vector<std::pair<EpochSeconds, EpochSeconds>> alternatives;

  bool operator==(const Interval&) const = default;
};

struct OccupancyBucket {
  std::string sector_id;
  EpochSeconds bucket_start = 0;
  EpochSeconds duration_s = kBucketSeconds;
  int count = 0;
  std::vector<int> alt_counts;  // at most 2

  bool operator==(const OccupancyBucket&) const = default;
};

struct FlowBucket {
  std::string sector_id;
  EpochSeconds bucket_start = 0;
  int entries = 0;
  int exits = 0;

  bool operator==(const FlowBucket&) const = default;
};

struct AirportFlowBucket {
  std::string airport_id;
  EpochSeconds bucket_start = 0;
  int arrivals = 0;
  int departures = 0;

  bool operator==(const AirportFlowBucket&) const = default;
};

struct SectorDay {
  std::vector<OccupancyBucket> occupancy;  // 96 entries
  std::vector<FlowBucket> flows;           // 96 entries
};

struct PrepReport {
  Date date{};
  std::size_t raw_events = 0;
  std::size_t duplicates = 0;
  std::size_t intervals = 0;
  std::size_t open_intervals = 0;   // missing exit, extended to day end
  std::size_t dropped_exits = 0;    // exit without entry
  std::size_t ambiguous_groups = 0;
  std::size_t airport_events = 0;
  std::size_t other_day_events = 0;  // timestamps outside the partition, ignored
};

/// Everything the preparation steps derive from one raw day.
struct PreparedDay {
  Date date{};
  std::vector<Interval> intervals;  // sorted by (sector, entry, flight)
  std::map<std::string, SectorDay> sectors;
  std::map<std::string, std::vector<AirportFlowBucket>> airports;
  PrepReport report;
};

/// Pure core of day preparation: collapse duplicates, pair entries and exits
/// per (flight, sector) in (timestamp, seq) order, expand ambiguity groups and
/// count. `sectors` and `airports` always get 96 buckets even without traffic;
/// resources seen only in the events are added.
PreparedDay prepare_events(const std::vector<store::FlightEvent>& events, Date date,
                           const std::vector<std::string>& sectors = {},
                           const std::vector<std::string>& airports = {});

/// Occupancy of a bucket set from intervals: distinct flights whose interval
/// overlaps each bucket, using the primary reading.
std::array<int, kBucketsPerDay> count_occupancy(const std::vector<Interval>& intervals, Date date);

}  // namespace aeroflow::pipeline
