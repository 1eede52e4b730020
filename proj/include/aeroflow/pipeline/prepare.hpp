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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "aeroflow/pipeline/buckets.hpp"
#include "aeroflow/store/store.hpp"

namespace aeroflow::pipeline {

/// Runs the five preparation steps for one raw day and publishes the result
/// by swapping the day's generation link. Re-running replaces the day.
/// Throws Error{RawMissing}.
PrepReport prepare_day(store::Store& store, Date date);

/// 96 buckets from the prepared day. Throws Error{NotPrepared}, Error{NotFound}
/// for a sector the day does not know.
std::vector<OccupancyBucket> occupancy_counts(const store::Store& store, const std::string& sector_id, Date date);
std::vector<FlowBucket> flow_counts(const store::Store& store, const std::string& sector_id, Date date);
std::vector<AirportFlowBucket> airport_flows(const store::Store& store, const std::string& airport_id, Date date);

/// All sectors of a prepared day, parsed from the PI export.
std::map<std::string, SectorDay> load_sector_days(const store::Store& store, Date date);
std::vector<Interval> load_intervals(const store::Store& store, Date date);

/// PI export: header `sector,bucket_start,occupancy,entries,exits,alt1,alt2`,
/// ISO-8601 UTC times, empty fields for absent alternatives.
std::string format_pi_csv(const std::map<std::string, SectorDay>& sectors);
std::map<std::string, SectorDay> parse_pi_csv(const std::string& text);

/// Writes the day's collections (ST, FI, SA, PI, airport flows) into `dir`.
void write_prepared(const PreparedDay& day, const std::filesystem::path& dir);

inline constexpr std::size_t kFiPartitionSize = 100000;

}  // namespace aeroflow::pipeline
