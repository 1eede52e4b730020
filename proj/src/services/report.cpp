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

#include "aeroflow/services/report.hpp"

#include "aeroflow/core/error.hpp"
#include "aeroflow/core/fileio.hpp"
#include "aeroflow/pipeline/prepare.hpp"

namespace aeroflow::services {

SectorEvaluation evaluate_sector(const store::Store& store, const std::string& sector_id, const DateRange& range,
                                 const eval::CvConfig& cv, const std::vector<eval::Candidate>& candidates) {
  const auto ts = pipeline::build_training_set(store, sector_id, pipeline::Target::Occupancy, range);
  const auto sel = eval::select_model(ts.data, candidates, cv);
  ml::Hyper hyper;
  for (const auto& c : candidates) {
    if (c.kind == sel.best_kind) {
      hyper = c.hyper;
      break;
    }
  }
  auto raw = ts.data;
  for (auto& a : raw.alt_y) a.clear();

  SectorEvaluation out;
  out.best_kind = sel.best_kind;
  out.result.sector = sector_id;
  out.result.balanced_score = sel.best_score;
  out.result.raw_score = ts.data.has_alternatives() ? eval::cross_validate(raw, sel.best_kind, hyper, cv).mean
                                                    : sel.best_score;
  for (const Date d : range.days()) {
    const auto flows = pipeline::flow_counts(store, sector_id, d);
    double total = 0.0;
    for (const auto& f : flows) total += f.entries;
    out.result.daily_entries.push_back(total);
  }
  return out;
}

nlohmann::ordered_json to_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["range"] = r.range;
  j["sectors"] = nlohmann::ordered_json::array();
  for (const auto& s : r.sectors) {
    nlohmann::ordered_json e;
    e["sector"] = s.result.sector;
    e["best_kind"] = ml::to_string(s.best_kind);
    e["raw_score"] = s.result.raw_score;
    e["balanced_score"] = s.result.balanced_score;
    e["daily_entries"] = s.result.daily_entries;
    j["sectors"].push_back(std::move(e));
  }
  j["airports"] = nlohmann::ordered_json::array();
  for (const auto& a : r.airports) {
    nlohmann::ordered_json e;
    e["airport"] = a.airport_id;
    e["arrival_day_scores"] = a.arrival_day_scores;
    e["departure_day_scores"] = a.departure_day_scores;
    j["airports"].push_back(std::move(e));
  }
  return j;
}

EvaluationReport report_from_json(const nlohmann::json& j) {
  try {
    EvaluationReport r;
    r.range = j.at("range").get<std::string>();
    for (const auto& e : j.at("sectors")) {
      SectorEvaluation s;
      s.result.sector = e.at("sector").get<std::string>();
      const auto kind = ml::parse_model_kind(e.at("best_kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::FormatError, "unknown model kind in evaluation report");
      s.best_kind = *kind;
      s.result.raw_score = e.at("raw_score").get<double>();
      s.result.balanced_score = e.at("balanced_score").get<double>();
      s.result.daily_entries = e.at("daily_entries").get<std::vector<double>>();
      r.sectors.push_back(std::move(s));
    }
    for (const auto& e : j.at("airports")) {
      r.airports.push_back({e.at("airport").get<std::string>(), e.at("arrival_day_scores").get<std::vector<double>>(),
                            e.at("departure_day_scores").get<std::vector<double>>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("evaluation report: ") + e.what());
  }
}

std::vector<std::filesystem::path> write_plot_files(const EvaluationReport& r, const std::filesystem::path& dir,
                                                    int bins) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto emit = [&](const std::string& name, const std::string& text) {
    write_atomic(dir / name, text);
    written.push_back(dir / name);
  };
  std::vector<eval::SectorResult> results;
  std::vector<double> balanced;
  for (const auto& s : r.sectors) {
    results.push_back(s.result);
    balanced.push_back(s.result.balanced_score);
  }
  emit("scatter.csv", eval::scatter_csv(eval::score_scatter(results)));
  if (!balanced.empty()) emit("histogram.csv", eval::histogram_csv(eval::score_histogram(balanced, bins)));
  std::vector<double> arr;
  std::vector<double> dep;
  for (const auto& a : r.airports) {
    arr.insert(arr.end(), a.arrival_day_scores.begin(), a.arrival_day_scores.end());
    dep.insert(dep.end(), a.departure_day_scores.begin(), a.departure_day_scores.end());
  }
  if (!arr.empty()) emit("histogram_arrivals.csv", eval::histogram_csv(eval::score_histogram(arr, bins)));
  if (!dep.empty()) emit("histogram_departures.csv", eval::histogram_csv(eval::score_histogram(dep, bins)));
  return written;
}

}  // namespace aeroflow::services
