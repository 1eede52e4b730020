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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aeroflow/eval/eval.hpp"
#include "aeroflow/services/airport_service.hpp"
#include "aeroflow/store/store.hpp"

namespace aeroflow::services {

struct SectorEvaluation {
  eval::SectorResult result;
  ml::ModelKind best_kind = ml::ModelKind::Mean;
};

struct AirportScores {
  std::string airport_id;
  std::vector<double> arrival_day_scores;
  std::vector<double> departure_day_scores;
};

/// Everything `plot` needs, saved by `evaluate` as evaluation.json.
struct EvaluationReport {
  std::string range;
  std::vector<SectorEvaluation> sectors;
  std::vector<AirportScores> airports;
};

/// Selects a model for the sector's occupancy over `range`, then reports the
/// winner's CV score twice: against the primary counts only (raw) and with
/// the ambiguity alternatives (balanced). Throws as build_training_set and
/// select_model.
SectorEvaluation evaluate_sector(const store::Store& store, const std::string& sector_id, const DateRange& range,
                                 const eval::CvConfig& cv = {},
                                 const std::vector<eval::Candidate>& candidates = eval::default_candidates());

nlohmann::ordered_json to_json(const EvaluationReport& r);
/// Throws Error{FormatError}.
EvaluationReport report_from_json(const nlohmann::json& j);

/// Writes scatter.csv and histogram.csv (sector balanced scores), plus
/// histogram_arrivals.csv and histogram_departures.csv (per-day airport
/// scores) when the report has airports.
std::vector<std::filesystem::path> write_plot_files(const EvaluationReport& r, const std::filesystem::path& dir,
                                                    int bins = 10);

}  // namespace aeroflow::services
