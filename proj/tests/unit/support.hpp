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

// Shared helpers for the unit and acceptance tests.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "aeroflow/core/time.hpp"
#include "aeroflow/metar/metar.hpp"
#include "aeroflow/core/rng.hpp"
#include "aeroflow/pipeline/features.hpp"
#include "aeroflow/services/airport_service.hpp"
#include "aeroflow/eval/eval.hpp"
#include "aeroflow/store/event.hpp"
#include "aeroflow/store/store.hpp"
#include "aeroflow/traffic/scenario.hpp"

namespace aeroflow::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "af");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path source_path(const std::string& relative);

store::FlightEvent event(const std::string& flight, store::EventKind kind, const std::string& resource,
                         EpochSeconds ts, std::uint64_t seq = 0);

/// Plain observation with the given wind, stamped at `t`.
metar::WeatherObservation observation(const std::string& station, EpochSeconds t, int wind_dir, double wind_kt,
                                      int visibility_m = 10000);

/// Sector source answering from a fixed table; unknown keys throw, and
/// `down` makes every call throw.
class TableSectorSource : public services::SectorSource {
 public:
  std::map<std::pair<std::string, pipeline::Target>, double> values;
  bool down = false;
  std::size_t calls = 0;

  double predict(const std::string& sector_id, pipeline::Target target, EpochSeconds bucket_start,
                 const metar::WeatherObservation& weather) override;
};

/// Constant runway-configuration classifier that always answers `rc`.
ml::TrainedModel constant_classifier(const std::string& rc);

/// A random airport with overlapping runway sector lists, a chosen active
/// configuration and random per-sector flow predictions.
struct CompositionCase {
  services::PlatformConfig platform;
  std::string airport;
  std::string rc;
  std::map<std::pair<std::string, pipeline::Target>, double> values;
};
CompositionCase random_composition_case(Rng& rng);

/// Generates, ingests and prepares every day of `range`.
void load_days(store::Store& store, const traffic::Scenario& scenario, const DateRange& range);

/// Default kinds with a shorter boosting schedule, for tests that train many models.
std::vector<eval::Candidate> light_candidates();

/// Trains and publishes every model the mesh expects: occupancy for all
/// sectors, exits/entries for airport sectors and each runway classifier.
void train_all(store::Store& store, const DateRange& range);

}  // namespace aeroflow::testing
