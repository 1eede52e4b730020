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

#include "aeroflow/services/sector_service.hpp"

#include "aeroflow/core/error.hpp"

namespace aeroflow::services {

SectorService::SectorService(PlatformConfig config, store::Store* store, eval::CvConfig cv,
                             std::vector<eval::Candidate> candidates)
    : config_(std::move(config)),
      store_(store),
      cv_(cv),
      candidates_(std::move(candidates)),
      table_(std::make_shared<Table>()) {}

std::shared_ptr<const SectorService::Table> SectorService::snapshot() const {
  std::lock_guard lock(mu_);
  return table_;
}

const std::string& SectorService::station_of(const std::string& sector_id) const {
  const auto* s = config_.find_sector(sector_id);
  if (s == nullptr) throw Error(ErrorCode::NoPredictor, "unknown sector " + sector_id);
  return s->station;
}

SectorTraining SectorService::train_from_dataset(const std::string& sector_id, pipeline::Target target,
                                                 const pipeline::Dataset& data, const std::string& trained_range) {
  SectorTraining out;
  out.selection = eval::select_model(data, candidates_, cv_);
  auto model = out.selection.model;
  model.sector_id = sector_id;
  model.target = std::string(pipeline::to_string(target));
  model.meta.trained_range = trained_range;
  SectorPredictor p{sector_id, target, std::move(model), out.selection.best_score, 0, {}};
  if (store_ != nullptr) p.model_id = store_->publish_model(p.model);
  p.version = install(p);
  out.predictor = std::move(p);
  return out;
}

SectorTraining SectorService::train_sector(const std::string& sector_id, pipeline::Target target,
                                           const DateRange& range) {
  if (store_ == nullptr) throw Error(ErrorCode::NotFound, "sector service has no store to train from");
  if (config_.find_sector(sector_id) == nullptr) throw Error(ErrorCode::NotFound, "unknown sector " + sector_id);
  auto ts = pipeline::build_training_set(*store_, sector_id, target, range);
  auto out = train_from_dataset(sector_id, target, ts.data, range.to_string());
  out.excluded_rows = ts.excluded;
  return out;
}

std::uint64_t SectorService::install(SectorPredictor predictor) {
  std::lock_guard lock(mu_);
  auto next = std::make_shared<Table>(*table_);
  const Key key{predictor.sector_id, predictor.target};
  auto it = next->find(key);
  predictor.version = it == next->end() ? 1 : it->second->version + 1;
  const auto version = predictor.version;
  (*next)[key] = std::make_shared<const SectorPredictor>(std::move(predictor));
  table_ = std::move(next);
  return version;
}

std::size_t SectorService::load_published() {
  if (store_ == nullptr) return 0;
  std::size_t loaded = 0;
  for (const auto& sector : config_.sectors) {
    for (auto target : {pipeline::Target::Occupancy, pipeline::Target::Entries, pipeline::Target::Exits}) {
      const auto id = store_->latest_model(sector.id, std::string(pipeline::to_string(target)));
      if (!id) continue;
      SectorPredictor p{sector.id, target, store_->load_model(*id), 0.0, 0, *id};
      install(std::move(p));
      ++loaded;
    }
  }
  return loaded;
}

std::shared_ptr<const SectorPredictor> SectorService::predictor(const std::string& sector_id,
                                                                pipeline::Target target) const {
  const auto table = snapshot();
  auto it = table->find({sector_id, target});
  return it == table->end() ? nullptr : it->second;
}

std::size_t SectorService::predictor_count() const { return snapshot()->size(); }

double SectorService::predict_sector(const std::string& sector_id, pipeline::Target target, EpochSeconds bucket_start,
                                     const metar::WeatherObservation& weather) const {
  const auto p = predictor(sector_id, target);
  if (!p) {
    throw Error(ErrorCode::NoPredictor,
                "no " + std::string(pipeline::to_string(target)) + " predictor for sector " + sector_id);
  }
  const auto f = pipeline::build_features(bucket_start, weather);
  return ml::predict(p->model, f.span());
}

std::vector<std::pair<EpochSeconds, double>> SectorService::predict_horizon(const std::string& sector_id,
                                                                            pipeline::Target target, EpochSeconds from,
                                                                            EpochSeconds to,
                                                                            const pipeline::WeatherSource& weather) const {
  if (!bucket_aligned(from) || !bucket_aligned(to) || to < from) {
    throw Error(ErrorCode::BadConfig, "horizon bounds must be bucket aligned with from <= to");
  }
  std::vector<std::pair<EpochSeconds, double>> out;
  if (from == to) return out;
  if (!predictor(sector_id, target)) {
    throw Error(ErrorCode::NoPredictor,
                "no " + std::string(pipeline::to_string(target)) + " predictor for sector " + sector_id);
  }
  const auto& station = station_of(sector_id);
  for (EpochSeconds t = from; t < to; t += kBucketSeconds) {
    const auto* obs = weather.latest(station, t);
    if (obs == nullptr || t - *obs->obs_time > pipeline::kWeatherHorizon) {
      throw Error(ErrorCode::NoWeather, "no weather from " + station + " for " + format_iso(t));
    }
    out.emplace_back(t, predict_sector(sector_id, target, t, *obs));
  }
  return out;
}

}  // namespace aeroflow::services
