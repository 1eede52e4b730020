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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "aeroflow/core/error.hpp"
#include "aeroflow/core/fileio.hpp"
#include "aeroflow/pipeline/buckets.hpp"
#include "aeroflow/pipeline/features.hpp"
#include "aeroflow/pipeline/prepare.hpp"
#include "aeroflow/store/store.hpp"
#include "aeroflow/traffic/scenario.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace aeroflow::pipeline {
namespace {

using store::EventKind;
using store::FlightEvent;
using testing::event;

const Date kDate = make_date(2024, 3, 1);
const EpochSeconds T0 = day_start(kDate);

std::vector<FlightEvent> numbered(std::vector<FlightEvent> events) {
  for (std::size_t i = 0; i < events.size(); ++i) events[i].source_seq = i;
  return events;
}

const SectorDay& sector(const PreparedDay& day, const std::string& id) { return day.sectors.at(id); }

TEST(Buckets, BoundaryExitDoesNotSpill) {
  const auto day = prepare_events(numbered({event("A", EventKind::SectorEntry, "S", T0 + 100),
                                            event("A", EventKind::SectorExit, "S", T0 + 900)}),
                                  kDate);
  const auto& s = sector(day, "S");
  EXPECT_EQ(s.occupancy[0].count, 1);
  EXPECT_EQ(s.occupancy[1].count, 0);
  EXPECT_EQ(s.flows[0].entries, 1);
  EXPECT_EQ(s.flows[1].exits, 1);
}

TEST(Buckets, SpanningIntervalAndDistinctFlights) {
  const auto day = prepare_events(numbered({event("A", EventKind::SectorEntry, "S", T0 + 800),
                                            event("A", EventKind::SectorExit, "S", T0 + 2000),
                                            event("A", EventKind::SectorEntry, "S", T0 + 2100),
                                            event("A", EventKind::SectorExit, "S", T0 + 2200),
                                            event("B", EventKind::SectorEntry, "S", T0 + 1000),
                                            event("B", EventKind::SectorExit, "S", T0 + 1100)}),
                                  kDate);
  const auto& s = sector(day, "S");
  EXPECT_EQ(s.occupancy[0].count, 1);
  EXPECT_EQ(s.occupancy[1].count, 2);  // A counted once despite two intervals
  EXPECT_EQ(s.occupancy[2].count, 1);
  EXPECT_EQ(s.flows[2].entries, 1);
  EXPECT_EQ(day.report.intervals, 3u);
}

TEST(Buckets, ZeroLengthIntervalOccupiesNothing) {
  const auto day = prepare_events(numbered({event("A", EventKind::SectorEntry, "S", T0 + 450),
                                            event("A", EventKind::SectorExit, "S", T0 + 450)}),
                                  kDate);
  const auto& s = sector(day, "S");
  EXPECT_EQ(s.occupancy[0].count, 0);
  EXPECT_EQ(s.flows[0].entries, 1);
  EXPECT_EQ(s.flows[0].exits, 1);
}

TEST(Buckets, SecondEntryOpensNewInterval) {
  const auto day = prepare_events(numbered({event("A", EventKind::SectorEntry, "S", T0 + 100),
                                            event("A", EventKind::SectorEntry, "S", T0 + 5000),
                                            event("A", EventKind::SectorExit, "S", T0 + 5100)}),
                                  kDate);
  ASSERT_EQ(day.intervals.size(), 2u);
  EXPECT_TRUE(day.intervals[0].open_end);
  EXPECT_EQ(day.intervals[0].exit, T0 + 86400);
  EXPECT_EQ(day.report.open_intervals, 1u);
  const auto& s = sector(day, "S");
  EXPECT_EQ(s.occupancy[95].count, 1);
  int exits = 0;
  for (const auto& f : s.flows) exits += f.exits;
  EXPECT_EQ(exits, 1);
}

TEST(Buckets, UnmatchedExitDuplicatesAndOtherDays) {
  const auto day = prepare_events(numbered({event("A", EventKind::SectorExit, "S", T0 + 100),
                                            event("B", EventKind::SectorEntry, "S", T0 + 200),
                                            event("B", EventKind::SectorEntry, "S", T0 + 200),
                                            event("B", EventKind::SectorExit, "S", T0 + 300),
                                            event("C", EventKind::SectorEntry, "S", T0 - 10),
                                            event("C", EventKind::SectorEntry, "S", T0 + 86400)}),
                                  kDate);
  EXPECT_EQ(day.report.dropped_exits, 1u);
  EXPECT_EQ(day.report.duplicates, 1u);
  EXPECT_EQ(day.report.other_day_events, 2u);
  EXPECT_EQ(day.report.intervals, 1u);
  EXPECT_EQ(sector(day, "S").occupancy[0].count, 1);
}

TEST(Buckets, AlternativesFromAmbiguityGroup) {
  FlightEvent in = event("A", EventKind::SectorEntry, "S", T0 + 100);
  FlightEvent out = event("A", EventKind::SectorExit, "S", T0 + 200);
  in.ambiguity_group = out.ambiguity_group = "g";
  in.candidates = {{T0 + 100, 0}, {T0 + 1000, 1}, {T0 + 1900, 2}};
  out.candidates = {{T0 + 200, 0}, {T0 + 1100, 1}, {T0 + 2000, 2}};
  const auto day = prepare_events(numbered({in, out}), kDate);
  EXPECT_EQ(day.report.ambiguous_groups, 1u);
  const auto& s = sector(day, "S");
  EXPECT_EQ(s.occupancy[0].count, 1);
  EXPECT_EQ(s.occupancy[0].alt_counts, (std::vector<int>{0, 0}));
  EXPECT_EQ(s.occupancy[1].alt_counts, (std::vector<int>{1, 0}));
  EXPECT_EQ(s.occupancy[2].alt_counts, (std::vector<int>{0, 1}));
  EXPECT_TRUE(s.occupancy[3].alt_counts.empty());
}

TEST(Buckets, DeclaredResourcesGetEmptyDays) {
  const auto day = prepare_events({}, kDate, {"S1", "S2"}, {"FRA"});
  EXPECT_EQ(day.sectors.size(), 2u);
  EXPECT_EQ(day.sectors.at("S1").occupancy.size(), 96u);
  EXPECT_EQ(day.airports.at("FRA").size(), 96u);
  EXPECT_EQ(day.airports.at("FRA")[95].bucket_start, T0 + 95 * 900);
}

TEST(Buckets, AirportFlows) {
  const auto day = prepare_events(numbered({event("A", EventKind::Arrival, "FRA", T0 + 950),
                                            event("B", EventKind::Departure, "FRA", T0 + 10)}),
                                  kDate);
  EXPECT_EQ(day.airports.at("FRA")[1].arrivals, 1);
  EXPECT_EQ(day.airports.at("FRA")[0].departures, 1);
  EXPECT_EQ(day.report.airport_events, 2u);
}

std::vector<oracle::Event> to_oracle(const std::vector<FlightEvent>& events) {
  std::vector<oracle::Event> out;
  for (const auto& e : events) out.push_back({e.flight_id, static_cast<int>(e.kind), e.resource_id, e.timestamp, e.source_seq});
  return out;
}

TEST(Buckets, AgreesWithReplayOracleOnGeneratedDay) {
  auto sc = traffic::load_scenario(testing::source_path("scenarios/fra.yaml"));
  sc.ambiguity_rate = 0.0;
  sc.contain_in_day = false;
  const auto gen = traffic::generate_day(sc, kDate);
  auto events = gen.events;
  events.push_back(events[events.size() / 2]);  // an exact repeat
  events.back().source_seq = events.size() - 1;
  const auto day = prepare_events(events, kDate, sc.platform().sector_ids());
  const auto oracle_events = to_oracle(events);
  for (const auto& [id, sd] : day.sectors) {
    const auto ref = oracle::occupancy_oracle(oracle_events, id, T0);
    for (int b = 0; b < 96; ++b) {
      ASSERT_EQ(sd.occupancy[b].count, ref.occupancy[b]) << id << " bucket " << b;
      ASSERT_EQ(sd.flows[b].entries, ref.entries[b]) << id << " bucket " << b;
      ASSERT_EQ(sd.flows[b].exits, ref.exits[b]) << id << " bucket " << b;
    }
  }
}

TEST(Buckets, CountOccupancyMatchesPrepared) {
  const auto sc = traffic::load_scenario(testing::source_path("scenarios/fra.yaml"));
  const auto day = prepare_events(traffic::generate_day(sc, kDate).events, kDate);
  std::map<std::string, std::vector<Interval>> per_sector;
  for (const auto& iv : day.intervals) per_sector[iv.sector].push_back(iv);
  for (const auto& [id, ivs] : per_sector) {
    const auto counts = count_occupancy(ivs, kDate);
    for (int b = 0; b < 96; ++b) EXPECT_EQ(counts[b], day.sectors.at(id).occupancy[b].count);
  }
}

TEST(Features, Encoding) {
  auto obs = testing::observation("EDDF", T0 + 6 * 3600, 90, 12);
  const auto f = build_features(T0 + 6 * 3600, obs);
  ASSERT_EQ(feature_names().size(), kFeatureCount);
  EXPECT_NEAR(f.values[0], 1.0, 1e-15);  // hour_sin at 06:00
  EXPECT_NEAR(f.values[1], 0.0, 1e-15);
  EXPECT_EQ(f.values[2], 4.0);  // Friday
  EXPECT_EQ(f.values[6], 12.0);
  EXPECT_NEAR(f.values[7], 1.0, 1e-15);
  EXPECT_EQ(f.values[9], 1.0);
  EXPECT_EQ(f.values[11], 1013.0);
  EXPECT_EQ(f.values[12], 0.0);
  obs.wind_variable = true;
  obs.wind_dir_deg = 0;
  const auto v = build_features(T0 + 6 * 3600, obs);
  EXPECT_EQ(v.values[7], 0.0);
  EXPECT_EQ(v.values[8], 1.0);
  EXPECT_EQ(v.values[9], 0.0);
}

TEST(Features, StaleAndMissingWeather) {
  WeatherSource ws;
  ws.add(testing::observation("EDDF", T0, 90, 12));
  EXPECT_FALSE(build_features(T0 + 7200, ws, "EDDF").stale);
  EXPECT_TRUE(build_features(T0 + 7200 + 900, ws, "EDDF").stale);
  EXPECT_EQ(build_features(T0 + 86400, ws, "EDDF").values[12], 1.0);
  try {
    build_features(T0 + 86400 + 900, ws, "EDDF");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoWeather);
  }
  EXPECT_THROW(build_features(T0 - 900, ws, "EDDF"), Error);
  EXPECT_THROW(build_features(T0, ws, "KJFK"), Error);
  EXPECT_EQ(parse_target("exits"), Target::Exits);
  EXPECT_THROW(parse_target("arrivals"), Error);
}

TEST(Features, RcFeatures) {
  const auto obs = testing::observation("EDDF", T0, 270, 20, 800);
  const auto x = rc_features(obs);
  ASSERT_EQ(x.size(), rc_feature_names().size());
  EXPECT_NEAR(x[0], -1.0, 1e-15);
  EXPECT_EQ(x[2], 20.0);
  EXPECT_EQ(x[3], 800.0);
}

// Ingest, prepare and read back through the store.
class StoreBacked : public ::testing::Test {
 protected:
  void SetUp() override {
    sc_ = traffic::load_scenario(testing::source_path("scenarios/fra.yaml"));
    st_ = std::make_unique<store::Store>(dir_.path(), store::StoreOptions{.max_bytes = std::nullopt, .sync = false});
    st_->put_platform(sc_.platform());
    const auto range = parse_range("2024-03-01..2024-03-10");
    for (const Date d : range.days()) {
      auto out = traffic::generate_day(sc_, d);
      st_->append_raw_batch(out.events);
      st_->append_weather(out.weather);
      st_->append_rc(out.rc_log);
    }
  }

  testing::TempDir dir_;
  traffic::Scenario sc_;
  std::unique_ptr<store::Store> st_;
};

TEST_F(StoreBacked, TenDaysGive960Rows) {
  const auto range = parse_range("2024-03-01..2024-03-10");
  EXPECT_THROW(build_training_set(*st_, "FRA_AN", Target::Occupancy, range), Error);
  for (const Date d : range.days()) prepare_day(*st_, d);
  const auto ts = build_training_set(*st_, "FRA_AN", Target::Occupancy, range);
  EXPECT_EQ(ts.data.rows, 960u);
  EXPECT_EQ(ts.excluded, 0u);
  EXPECT_EQ(ts.data.cols, kFeatureCount);
  EXPECT_EQ(ts.bucket_starts.front(), day_start(range.first));
  EXPECT_THROW(build_training_set(*st_, "NOPE", Target::Occupancy, range), Error);
}

TEST_F(StoreBacked, PreparedMatchesInMemory) {
  const Date d = make_date(2024, 3, 4);
  try {
    occupancy_counts(*st_, "FRA_AN", d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPrepared);
  }
  const auto report = prepare_day(*st_, d);
  const auto mem = prepare_events(st_->read_day(d), d, sc_.platform().sector_ids(), sc_.platform().airport_ids());
  EXPECT_EQ(report.intervals, mem.report.intervals);
  for (const auto& [id, sd] : mem.sectors) {
    EXPECT_EQ(occupancy_counts(*st_, id, d), sd.occupancy) << id;
    EXPECT_EQ(flow_counts(*st_, id, d), sd.flows) << id;
  }
  EXPECT_EQ(airport_flows(*st_, "FRA", d), mem.airports.at("FRA"));
  EXPECT_EQ(load_intervals(*st_, d), mem.intervals);
  // Re-preparing swaps in an identical generation.
  prepare_day(*st_, d);
  EXPECT_EQ(load_sector_days(*st_, d).at("FRA_AS").occupancy, mem.sectors.at("FRA_AS").occupancy);
  try {
    prepare_day(*st_, make_date(2024, 4, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RawMissing);
  }
}

TEST(PiCsv, RoundTripWithAlternatives) {
  FlightEvent in = event("A", EventKind::SectorEntry, "S", T0 + 100);
  FlightEvent out = event("A", EventKind::SectorExit, "S", T0 + 200);
  in.ambiguity_group = out.ambiguity_group = "g";
  in.candidates = {{T0 + 100, 0}, {T0 + 1000, 1}};
  out.candidates = {{T0 + 200, 0}, {T0 + 1100, 1}};
  const auto day = prepare_events(numbered({in, out}), kDate, {"T"});
  const auto text = format_pi_csv(day.sectors);
  EXPECT_EQ(text.substr(0, text.find('\n')), "sector,bucket_start,occupancy,entries,exits,alt1,alt2");
  EXPECT_NE(text.find("S,2024-03-01T00:00:00Z,1,1,1,0,\n"), std::string::npos) << text.substr(0, 200);
  const auto back = parse_pi_csv(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.at("S").occupancy, day.sectors.at("S").occupancy);
  EXPECT_EQ(back.at("S").flows, day.sectors.at("S").flows);
  EXPECT_THROW(parse_pi_csv("sector,bucket_start,occupancy,entries,exits,alt1,alt2\nS,nope,1,1,1,,\n"), Error);
}

}  // namespace
}  // namespace aeroflow::pipeline
