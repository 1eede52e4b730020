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

#include "aeroflow/pipeline/buckets.hpp"

#include <algorithm>
#include <bitset>
#include <set>
#include <tuple>

namespace aeroflow::pipeline {

namespace {

using store::EventKind;
using store::FlightEvent;
using Mask = std::bitset<kBucketsPerDay>;

// Buckets overlapped by [entry, exit) relative to the day start.
Mask overlap_mask(EpochSeconds entry, EpochSeconds exit, EpochSeconds t0) {
  Mask m;
  const EpochSeconds lo = std::max<EpochSeconds>(entry, t0);
  const EpochSeconds hi = std::min<EpochSeconds>(exit, t0 + kSecondsPerDay);
  if (hi <= lo) return m;
  const auto first = static_cast<std::size_t>((lo - t0) / kBucketSeconds);
  const auto last = static_cast<std::size_t>((hi - 1 - t0) / kBucketSeconds);
  for (std::size_t b = first; b <= last; ++b) m.set(b);
  return m;
}

int candidate_count(const FlightEvent& e) { return static_cast<int>(e.candidates.size()); }

std::vector<OccupancyBucket> empty_occupancy(const std::string& sector, EpochSeconds t0) {
  std::vector<OccupancyBucket> v(kBucketsPerDay);
  for (int b = 0; b < kBucketsPerDay; ++b) v[b] = {sector, t0 + b * kBucketSeconds, kBucketSeconds, 0, {}};
  return v;
}

std::vector<FlowBucket> empty_flows(const std::string& sector, EpochSeconds t0) {
  std::vector<FlowBucket> v(kBucketsPerDay);
  for (int b = 0; b < kBucketsPerDay; ++b) v[b] = {sector, t0 + b * kBucketSeconds, 0, 0};
  return v;
}

}  // namespace

std::array<int, kBucketsPerDay> count_occupancy(const std::vector<Interval>& intervals, Date date) {
  const EpochSeconds t0 = day_start(date);
  std::map<std::string, Mask> by_flight;
  for (const auto& iv : intervals) by_flight[iv.flight_id] |= overlap_mask(iv.entry, iv.exit, t0);
  std::array<int, kBucketsPerDay> counts{};
  for (const auto& [fid, m] : by_flight) {
    for (int b = 0; b < kBucketsPerDay; ++b) counts[b] += m.test(b) ? 1 : 0;
  }
  return counts;
}

PreparedDay prepare_events(const std::vector<FlightEvent>& events, Date date, const std::vector<std::string>& sectors,
                           const std::vector<std::string>& airports) {
  PreparedDay day;
  day.date = date;
  day.report.date = date;
  day.report.raw_events = events.size();
  const EpochSeconds t0 = day_start(date);
  const EpochSeconds t_end = t0 + kSecondsPerDay;

  // Step 1: index by (flight, resource), collapsing exact duplicates.
  std::vector<const FlightEvent*> ordered;
  ordered.reserve(events.size());
  for (const auto& e : events) ordered.push_back(&e);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const FlightEvent* a, const FlightEvent* b) { return a->source_seq < b->source_seq; });
  std::set<std::tuple<std::string_view, int, std::string_view, EpochSeconds>> seen;
  std::map<std::pair<std::string_view, std::string_view>, std::vector<const FlightEvent*>> by_key;
  std::set<std::string> sector_ids(sectors.begin(), sectors.end());
  std::set<std::string> airport_ids(airports.begin(), airports.end());
  std::vector<const FlightEvent*> airport_events;
  std::set<std::string_view> groups;
  for (const FlightEvent* e : ordered) {
    if (e->timestamp < t0 || e->timestamp >= t_end) {
      ++day.report.other_day_events;
      continue;
    }
    if (!seen.emplace(e->flight_id, static_cast<int>(e->kind), e->resource_id, e->timestamp).second) {
      ++day.report.duplicates;
      continue;
    }
    if (e->ambiguity_group) groups.insert(*e->ambiguity_group);
    if (e->kind == EventKind::Arrival || e->kind == EventKind::Departure) {
      airport_ids.insert(e->resource_id);
      airport_events.push_back(e);
    } else {
      sector_ids.insert(e->resource_id);
      by_key[{e->flight_id, e->resource_id}].push_back(e);
    }
  }
  day.report.ambiguous_groups = groups.size();
  day.report.airport_events = airport_events.size();

  // Steps 3-4: pair in (timestamp, seq) order; expand ambiguity readings.
  auto make_interval = [&](const FlightEvent& in, const FlightEvent* out) {
    Interval iv;
    iv.flight_id = in.flight_id;
    iv.sector = in.resource_id;
    iv.entry = in.timestamp;
    iv.exit = out ? out->timestamp : t_end;
    iv.open_end = out == nullptr;
    iv.group = in.ambiguity_group ? in.ambiguity_group : (out ? out->ambiguity_group : std::nullopt);
    if (iv.group) {
      const int n = std::max(candidate_count(in), out ? candidate_count(*out) : 0);
      for (int k = 1; k < n; ++k) {
        iv.alternatives.emplace_back(in.timestamp_for(k), out ? out->timestamp_for(k) : t_end);
      }
    }
    if (iv.open_end) ++day.report.open_intervals;
    day.intervals.push_back(std::move(iv));
  };
  for (auto& [key, list] : by_key) {
    std::stable_sort(list.begin(), list.end(), [](const FlightEvent* a, const FlightEvent* b) {
      return a->timestamp != b->timestamp ? a->timestamp < b->timestamp : a->source_seq < b->source_seq;
    });
    const FlightEvent* open = nullptr;
    for (const FlightEvent* e : list) {
      if (e->kind == EventKind::SectorEntry) {
        if (open) make_interval(*open, nullptr);
        open = e;
      } else if (open) {
        make_interval(*open, e);
        open = nullptr;
      } else {
        ++day.report.dropped_exits;
      }
    }
    if (open) make_interval(*open, nullptr);
  }
  std::sort(day.intervals.begin(), day.intervals.end(), [](const Interval& a, const Interval& b) {
    return std::tie(a.sector, a.entry, a.flight_id, a.exit) < std::tie(b.sector, b.entry, b.flight_id, b.exit);
  });
  day.report.intervals = day.intervals.size();

  // Step 5: bucket counts per sector under the primary and alternative readings.
  for (const auto& s : sector_ids) day.sectors[s] = {empty_occupancy(s, t0), empty_flows(s, t0)};
  std::size_t i = 0;
  while (i < day.intervals.size()) {
    const std::string& sector = day.intervals[i].sector;
    std::size_t j = i;
    std::map<std::string_view, std::array<Mask, 3>> worlds;  // per flight, per reading
    std::array<int, kBucketsPerDay> alt_depth{};
    auto& sd = day.sectors[sector];
    for (; j < day.intervals.size() && day.intervals[j].sector == sector; ++j) {
      const auto& iv = day.intervals[j];
      const Mask primary = overlap_mask(iv.entry, iv.exit, t0);
      auto& w = worlds[iv.flight_id];
      w[0] |= primary;
      Mask touched = primary;
      for (std::size_t k = 1; k <= 2; ++k) {
        if (k <= iv.alternatives.size()) {
          const Mask alt = overlap_mask(iv.alternatives[k - 1].first, iv.alternatives[k - 1].second, t0);
          w[k] |= alt;
          touched |= alt;
        } else {
          w[k] |= primary;
        }
      }
      if (!iv.alternatives.empty()) {
        for (int b = 0; b < kBucketsPerDay; ++b) {
          if (touched.test(b)) alt_depth[b] = std::max(alt_depth[b], static_cast<int>(iv.alternatives.size()));
        }
      }
      sd.flows[static_cast<std::size_t>((iv.entry - t0) / kBucketSeconds)].entries++;
      if (!iv.open_end) sd.flows[static_cast<std::size_t>((iv.exit - t0) / kBucketSeconds)].exits++;
    }
    std::array<std::array<int, kBucketsPerDay>, 3> counts{};
    for (const auto& [fid, w] : worlds) {
      for (std::size_t k = 0; k < 3; ++k) {
        for (int b = 0; b < kBucketsPerDay; ++b) counts[k][b] += w[k].test(b) ? 1 : 0;
      }
    }
    for (int b = 0; b < kBucketsPerDay; ++b) {
      auto& ob = sd.occupancy[b];
      ob.count = counts[0][b];
      for (int k = 1; k <= alt_depth[b]; ++k) ob.alt_counts.push_back(counts[k][b]);
    }
    i = j;
  }

  for (const auto& a : airport_ids) {
    auto& v = day.airports[a];
    v.resize(kBucketsPerDay);
    for (int b = 0; b < kBucketsPerDay; ++b) v[b] = {a, t0 + b * kBucketSeconds, 0, 0};
  }
  for (const FlightEvent* e : airport_events) {
    auto& bucket = day.airports[e->resource_id][static_cast<std::size_t>((e->timestamp - t0) / kBucketSeconds)];
    (e->kind == EventKind::Arrival ? bucket.arrivals : bucket.departures)++;
  }
  return day;
}

}  // namespace aeroflow::pipeline
