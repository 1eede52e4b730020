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

#include <fstream>

#include "aeroflow/core/error.hpp"
#include "aeroflow/core/fileio.hpp"
#include "aeroflow/core/rng.hpp"
#include "aeroflow/ml/model.hpp"
#include "aeroflow/store/store.hpp"
#include "aeroflow/traffic/scenario.hpp"
#include "support.hpp"

namespace aeroflow::store {
namespace {

using testing::event;
using testing::TempDir;

const EpochSeconds kDay0 = day_start(make_date(2024, 3, 1));

TEST(EventCodec, RoundTrip) {
  FlightEvent e = event("DLH4", EventKind::SectorExit, "S01", kDay0 + 10, 17);
  e.ambiguity_group = "g1";
  e.candidates = {{kDay0 + 10, 0}, {kDay0 + 20, 1}};
  EXPECT_EQ(decode_event(encode_event(e)), e);
  EXPECT_EQ(e.timestamp_for(1), kDay0 + 20);
  EXPECT_EQ(e.timestamp_for(2), kDay0 + 10);
  EXPECT_EQ(parse_event_kind(to_string(EventKind::Arrival)), EventKind::Arrival);
  EXPECT_THROW(parse_event_kind("LANDING"), Error);
  EXPECT_THROW(decode_event("{\"fid\":\"x\""), Error);
}

TEST(EventCodec, Validation) {
  EXPECT_THROW(validate_event(event("", EventKind::SectorEntry, "S01", kDay0)), Error);
  EXPECT_THROW(validate_event(event("A", EventKind::SectorEntry, "", kDay0)), Error);
  EXPECT_THROW(validate_event(event("A", EventKind::SectorEntry, "S01", -5)), Error);
  FlightEvent e = event("A", EventKind::SectorEntry, "S01", kDay0);
  e.candidates = {{kDay0, 0}, {kDay0 + 5, 1}};
  EXPECT_THROW(validate_event(e), Error);  // candidates without a group
  e.ambiguity_group = "g";
  EXPECT_NO_THROW(validate_event(e));
  e.candidates[1].ts = kDay0 + 86400;
  EXPECT_THROW(validate_event(e), Error);
}

TEST(EventFile, ReplayNamesBadLine) {
  TempDir dir;
  const auto p = dir / "events-20240301.jsonl";
  write_event_file(p, {event("A", EventKind::SectorEntry, "S01", kDay0, 0), event("A", EventKind::SectorExit, "S01", kDay0 + 60, 1)});
  EXPECT_EQ(replay(p).size(), 2u);
  {
    std::ofstream out(p, std::ios::app);
    out << "{\"fid\":\"B\",\"kind\":";
  }
  try {
    replay(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FormatError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Store, AppendAssignsSequenceAndFlagsDuplicates) {
  TempDir dir;
  Store s(dir.path(), {.max_bytes = std::nullopt, .sync = false});
  const auto seqs = s.append_raw_batch({event("A", EventKind::SectorEntry, "S01", kDay0 + 5),
                                        event("A", EventKind::SectorEntry, "S01", kDay0 + 5),
                                        event("B", EventKind::SectorEntry, "S01", kDay0 + 86400 + 5)});
  EXPECT_EQ(seqs, (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_EQ(s.append_raw(event("A", EventKind::SectorEntry, "S01", kDay0 + 5)), 3u);
  EXPECT_EQ(s.read_day(make_date(2024, 3, 1)).size(), 3u);
  EXPECT_EQ(s.duplicate_seqs(make_date(2024, 3, 1)), (std::set<std::uint64_t>{1, 3}));
  EXPECT_EQ(s.raw_days().size(), 2u);
  EXPECT_THROW(s.read_day(make_date(2024, 3, 9)), Error);
  EXPECT_THROW(s.append_raw(event("", EventKind::SectorEntry, "S01", kDay0)), Error);
  EXPECT_EQ(s.next_seq(), 4u);
}

TEST(Store, SequenceSurvivesReopenAndTornTail) {
  TempDir dir;
  {
    Store s(dir.path(), {.max_bytes = std::nullopt, .sync = false});
    for (int i = 0; i < 5; ++i) s.append_raw(event("F" + std::to_string(i), EventKind::SectorEntry, "S01", kDay0 + i));
  }
  const auto file = dir.path() / "raw" / "events-20240301.jsonl";
  {
    std::ofstream out(file, std::ios::app);
    out << "{\"fid\":\"torn\",\"ki";
  }
  Store s(dir.path(), {.max_bytes = std::nullopt, .sync = false});
  EXPECT_EQ(s.next_seq(), 5u);
  EXPECT_EQ(s.read_day(make_date(2024, 3, 1)).size(), 5u);
  EXPECT_EQ(s.append_raw(event("G", EventKind::SectorEntry, "S01", kDay0 + 99)), 5u);
  const auto day = s.read_day(make_date(2024, 3, 1));
  ASSERT_EQ(day.size(), 6u);
  EXPECT_EQ(day.back().flight_id, "G");
  // Recovery remembers the keys already on disk.
  s.append_raw(event("F0", EventKind::SectorEntry, "S01", kDay0));
  EXPECT_EQ(s.duplicate_seqs(make_date(2024, 3, 1)), (std::set<std::uint64_t>{6}));
}

// Truncating the log at any byte leaves a store that reopens, keeps every
// complete record and continues the sequence after the last one.
TEST(Store, TruncationFuzz) {
  TempDir dir;
  std::vector<FlightEvent> events;
  for (int i = 0; i < 20; ++i) events.push_back(event("F" + std::to_string(i), EventKind::SectorEntry, "S01", kDay0 + i));
  {
    Store s(dir.path(), {.max_bytes = std::nullopt, .sync = false});
    s.append_raw_batch(events);
  }
  const auto file = dir.path() / "raw" / "events-20240301.jsonl";
  const std::string full = read_text(file);
  Rng rng(9);
  for (int trial = 0; trial < 60; ++trial) {
    const auto cut = rng.below(full.size() + 1);
    write_atomic(file, full.substr(0, cut));
    const std::string kept = full.substr(0, cut);
    const auto complete = static_cast<std::uint64_t>(std::count(kept.begin(), kept.end(), '\n'));
    Store s(dir.path(), {.max_bytes = std::nullopt, .sync = false});
    EXPECT_EQ(s.next_seq(), complete);
    EXPECT_EQ(s.read_day(make_date(2024, 3, 1)).size(), complete);
    EXPECT_EQ(s.append_raw(event("Z", EventKind::SectorExit, "S01", kDay0 + 500)), complete);
    EXPECT_EQ(s.read_day(make_date(2024, 3, 1)).size(), complete + 1);
  }
}

TEST(Store, StorageFull) {
  TempDir dir;
  Store s(dir.path(), {.max_bytes = 300, .sync = false});
  s.append_raw(event("A", EventKind::SectorEntry, "S01", kDay0));
  std::vector<FlightEvent> many;
  for (int i = 0; i < 10; ++i) many.push_back(event("B" + std::to_string(i), EventKind::SectorEntry, "S01", kDay0 + i));
  try {
    s.append_raw_batch(many);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StorageFull);
  }
  EXPECT_EQ(s.read_day(make_date(2024, 3, 1)).size(), 1u);  // nothing partial
}

TEST(Store, WeatherRcAndPlatform) {
  TempDir dir;
  Store s(dir.path(), {.max_bytes = std::nullopt, .sync = false});
  auto o = testing::observation("EDDF", kDay0 + 1800, 250, 12);
  s.append_weather({o});
  const auto back = s.read_weather(make_date(2024, 3, 1));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_TRUE(back[0].same_fields(o));
  EXPECT_EQ(back[0].obs_time, o.obs_time);
  EXPECT_TRUE(s.read_weather(make_date(2024, 3, 2)).empty());
  o.obs_time.reset();
  EXPECT_THROW(s.append_weather({o}), Error);

  s.append_rc({{"FRA", kDay0 + 60, "WEST"}});
  EXPECT_EQ(s.read_rc(make_date(2024, 3, 1)), (std::vector<RcRecord>{{"FRA", kDay0 + 60, "WEST"}}));

  EXPECT_FALSE(s.has_platform());
  EXPECT_THROW(s.platform(), Error);
  const auto cfg = traffic::load_scenario(testing::source_path("scenarios/fra.yaml")).platform();
  s.put_platform(cfg);
  EXPECT_EQ(s.platform().sector_ids(), cfg.sector_ids());
  EXPECT_EQ(s.platform().airport_ids(), cfg.airport_ids());
}

TEST(Store, PreparedGenerationsSwap) {
  TempDir dir;
  Store s(dir.path(), {.max_bytes = std::nullopt, .sync = false});
  const Date d = make_date(2024, 3, 1);
  EXPECT_FALSE(s.is_prepared(d));
  const auto g1 = s.stage_prepared(d);
  write_atomic(g1 / "ST.json", "{\"gen\":1}");
  s.commit_prepared(d, g1);
  EXPECT_TRUE(s.is_prepared(d));
  EXPECT_EQ(read_text(s.prepared_dir(d) / "ST.json"), "{\"gen\":1}");
  const auto g2 = s.stage_prepared(d);
  EXPECT_NE(g1, g2);
  write_atomic(g2 / "ST.json", "{\"gen\":2}");
  s.commit_prepared(d, g2);
  EXPECT_EQ(read_text(s.prepared_dir(d) / "ST.json"), "{\"gen\":2}");
  const auto g3 = s.stage_prepared(d);
  write_atomic(g3 / "ST.json", "{\"gen\":3}");
  s.commit_prepared(d, g3);
  EXPECT_FALSE(std::filesystem::exists(g1));
  EXPECT_TRUE(std::filesystem::exists(g2));  // the one just replaced stays
}

TEST(Store, ModelRegistry) {
  TempDir dir;
  Store s(dir.path(), {.max_bytes = std::nullopt, .sync = false});
  pipeline::Dataset data;
  data.feature_names = {"x"};
  data.cols = 1;
  for (int i = 0; i < 10; ++i) data.add_row(std::vector<double>{double(i)}, 2.0 * i);
  auto m = ml::train(ml::ModelKind::Ridge, data);
  m.sector_id = "S01";
  m.target = "occupancy";
  const auto id1 = s.publish_model(m);
  const auto id2 = s.publish_model(m);
  EXPECT_EQ(id1, "m000001");
  EXPECT_EQ(id2, "m000002");
  EXPECT_EQ(s.load_model(id1), m);
  EXPECT_EQ(s.latest_model("S01", "occupancy"), id2);
  EXPECT_FALSE(s.latest_model("S01", "exits"));
  ASSERT_EQ(s.model_index().size(), 2u);
  EXPECT_EQ(s.model_index()[0].kind, "RIDGE");
  try {
    s.load_model("m999999");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFound);
  }
  try {
    s.publish_artifact("{\"kind\":\"FOREST\"}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaMismatch);
  }
  // Ids continue after reopen.
  Store again(dir.path(), {.max_bytes = std::nullopt, .sync = false});
  EXPECT_EQ(again.publish_model(m), "m000003");
}

TEST(Store, ResolveRootHonoursEnvironment) {
  ::setenv("AF_STORE_DIR", "/tmp/af-env-root", 1);
  EXPECT_EQ(Store::resolve_root("fallback"), "/tmp/af-env-root");
  ::unsetenv("AF_STORE_DIR");
  EXPECT_EQ(Store::resolve_root("fallback"), "fallback");
}

}  // namespace
}  // namespace aeroflow::store
