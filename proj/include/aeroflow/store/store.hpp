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
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "aeroflow/core/time.hpp"
#include "aeroflow/metar/metar.hpp"
#include "aeroflow/ml/model.hpp"
#include "aeroflow/services/topology.hpp"
#include "aeroflow/store/event.hpp"

namespace aeroflow::store {

struct StoreOptions {
  /// Cap on the total size of raw segments; appends beyond it raise StorageFull.
  std::optional<std::uintmax_t> max_bytes;
  /// fsync every append. Off only for bulk loads that can be redone.
  bool sync = true;
};

/// One runway-configuration log entry: the configuration in force at `ts`.
struct RcRecord {
  std::string airport;
  EpochSeconds ts = 0;
  std::string rc;

  bool operator==(const RcRecord&) const = default;
};

struct ModelIndexEntry {
  std::string id;
  std::string scope;  // sector or airport id
  std::string target;
  std::string kind;
};

/// Embedded two-tier store rooted at a directory.
///
///   raw/events-YYYYMMDD.jsonl     append-only flight events (R-store)
///   raw/events-YYYYMMDD.dups      seqs flagged as duplicates of earlier records
///   raw/weather-YYYYMMDD.jsonl    decoded METAR observations
///   raw/rc-YYYYMMDD.jsonl         runway-configuration log
///   config/topology.yaml          sectors, stations and airport topologies
///   prepared/YYYYMMDD -> YYYYMMDD.gN/   prepared day (P-store), swapped by rename
///   ml/<id>.json, ml/index.json   published model artifacts
///
/// One writer per day segment; readers never need a lock.
class Store {
 public:
  explicit Store(std::filesystem::path root, StoreOptions options = {});

  /// $AF_STORE_DIR if set, else `fallback`.
  static std::filesystem::path resolve_root(const std::filesystem::path& fallback);

  const std::filesystem::path& root() const { return root_; }

  // --- raw flight events ---------------------------------------------------

  /// Validates, assigns the next sequence number and appends durably.
  /// Throws Error{ValidationError, StorageFull}.
  std::uint64_t append_raw(FlightEvent event);
  /// Same contract for many events with one flush per touched segment.
  std::vector<std::uint64_t> append_raw_batch(std::vector<FlightEvent> events);

  /// All events of the UTC day in sequence order. Throws Error{NotFound}.
  std::vector<FlightEvent> read_day(Date d) const;
  /// Creates an empty partition so a day without traffic still exists.
  void ensure_day(Date d);
  bool has_raw_day(Date d) const;
  std::vector<Date> raw_days() const;
  /// Sequence numbers whose (flight, kind, resource, timestamp) repeats an
  /// earlier record of the same day.
  std::set<std::uint64_t> duplicate_seqs(Date d) const;
  std::uint64_t next_seq() const;

  // --- weather and runway-configuration log -------------------------------

  /// Requires obs_time. Stored under the observation's UTC day.
  void append_weather(const std::vector<metar::WeatherObservation>& observations);
  /// Observations of one day (empty when none were ingested).
  std::vector<metar::WeatherObservation> read_weather(Date d) const;

  void append_rc(const std::vector<RcRecord>& records);
  std::vector<RcRecord> read_rc(Date d) const;

  // --- configuration -------------------------------------------------------

  void put_platform(const services::PlatformConfig& cfg);
  /// Throws Error{NotFound} when no topology has been stored.
  services::PlatformConfig platform() const;
  bool has_platform() const;

  // --- prepared days -------------------------------------------------------

  std::filesystem::path prepared_root() const { return root_ / "prepared"; }
  /// Path readers use; resolves through the current generation link.
  std::filesystem::path prepared_dir(Date d) const;
  bool is_prepared(Date d) const;
  /// Fresh empty generation directory for `d`, not yet visible to readers.
  std::filesystem::path stage_prepared(Date d) const;
  /// Atomically points the day link at `generation` and drops generations
  /// older than the one it replaced.
  void commit_prepared(Date d, const std::filesystem::path& generation) const;

  // --- model registry ------------------------------------------------------

  /// Throws Error{SchemaMismatch} when the artifact does not decode.
  std::string publish_model(const ml::TrainedModel& model);
  /// Publishes artifact text verbatim after validating it.
  std::string publish_artifact(const std::string& json_text);
  /// Throws Error{NotFound, SchemaMismatch}.
  ml::TrainedModel load_model(const std::string& id) const;
  std::string load_artifact_text(const std::string& id) const;
  std::vector<ModelIndexEntry> model_index() const;
  /// Most recently published model for (scope, target), if any.
  std::optional<std::string> latest_model(const std::string& scope, const std::string& target) const;

 private:
  struct Segment {
    bool recovered = false;
    std::set<std::tuple<std::string, int, std::string, EpochSeconds>> keys;
  };

  std::filesystem::path raw_path(const std::string& prefix, Date d, const char* ext = ".jsonl") const;
  void recover_tail(const std::filesystem::path& path) const;
  void append_lines(const std::filesystem::path& path, const std::string& text);
  Segment& segment(Date d);
  void write_index_locked(const std::vector<ModelIndexEntry>& index) const;

  std::filesystem::path root_;
  StoreOptions options_;
  std::uint64_t next_seq_ = 0;
  std::uintmax_t raw_bytes_ = 0;
  std::map<int, Segment> segments_;  // keyed by yyyymmdd
  mutable std::mutex ml_mutex_;
};

}  // namespace aeroflow::store
