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

#include "aeroflow/services/airport_service.hpp"

#include <cstdio>
#include <numeric>

#include "aeroflow/core/error.hpp"
#include "aeroflow/pipeline/prepare.hpp"

namespace aeroflow::services {

namespace {

using ClassifierTable = std::map<std::string, std::shared_ptr<const ml::TrainedModel>>;

constexpr const char* kRcTarget = "rc";

pipeline::Dataset rc_dataset(const std::vector<std::pair<metar::WeatherObservation, std::string>>& history) {
  pipeline::Dataset data;
  data.feature_names = pipeline::rc_feature_names();
  data.cols = data.feature_names.size();
  for (const auto& [obs, rc] : history) data.add_row(pipeline::rc_features(obs), 0.0);
  return data;
}

double rc_cv_accuracy(const pipeline::Dataset& data, const std::vector<std::string>& labels, const ml::Hyper& hyper) {
  const auto folds = eval::kfold_split(data.rows, {5, hyper.seed});
  std::size_t correct = 0;
  std::vector<char> held(data.rows);
  for (const auto& fold : folds) {
    std::fill(held.begin(), held.end(), 0);
    for (auto i : fold) held[i] = 1;
    std::vector<std::size_t> train_idx;
    std::vector<std::string> train_labels;
    for (std::size_t i = 0; i < data.rows; ++i) {
      if (held[i]) continue;
      train_idx.push_back(i);
      train_labels.push_back(labels[i]);
    }
    const auto model = ml::train_classifier(data.subset(train_idx), train_labels, hyper);
    for (auto i : fold) correct += ml::predict_class(model, data.row(i)).name == labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(data.rows);
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

AirportService::AirportService(PlatformConfig config, SectorSource& sectors, store::Store* store)
    : config_(std::move(config)),
      sectors_(sectors),
      store_(store),
      classifiers_(std::make_shared<ClassifierTable>()) {}

const AirportTopology& AirportService::topology(const std::string& airport_id) const {
  const auto* t = config_.find_airport(airport_id);
  if (t == nullptr) throw Error(ErrorCode::NoTopology, "no topology for airport " + airport_id);
  return *t;
}

RcTraining AirportService::train_rc_classifier(
    const std::string& airport_id, const std::vector<std::pair<metar::WeatherObservation, std::string>>& history,
    const ml::Hyper& hyper) {
  topology(airport_id);
  if (history.size() < kMinRcSamples) {
    throw Error(ErrorCode::InsufficientData, std::to_string(history.size()) + " samples for " + airport_id +
                                                 " (need " + std::to_string(kMinRcSamples) + ")");
  }
  const auto data = rc_dataset(history);
  std::vector<std::string> labels;
  labels.reserve(history.size());
  for (const auto& h : history) labels.push_back(h.second);

  RcTraining out;
  out.model = ml::train_classifier(data, labels, hyper);
  out.model.airport_id = airport_id;
  out.model.target = kRcTarget;
  const bool single = std::get<ml::LogisticParams>(out.model.params).single_class;
  out.cv_accuracy = single ? 1.0 : rc_cv_accuracy(data, labels, hyper);
  if (store_ != nullptr) out.model_id = store_->publish_model(out.model);
  install_classifier(airport_id, out.model);
  return out;
}

void AirportService::install_classifier(const std::string& airport_id, ml::TrainedModel model) {
  std::lock_guard lock(mu_);
  auto next = std::make_shared<ClassifierTable>(*classifiers_);
  (*next)[airport_id] = std::make_shared<const ml::TrainedModel>(std::move(model));
  classifiers_ = std::move(next);
}

std::size_t AirportService::load_published() {
  if (store_ == nullptr) return 0;
  std::size_t loaded = 0;
  for (const auto& a : config_.airports) {
    const auto id = store_->latest_model(a.airport_id, kRcTarget);
    if (!id) continue;
    install_classifier(a.airport_id, store_->load_model(*id));
    ++loaded;
  }
  return loaded;
}

std::shared_ptr<const ml::TrainedModel> AirportService::classifier(const std::string& airport_id) const {
  std::shared_ptr<const ClassifierTable> table;
  {
    std::lock_guard lock(mu_);
    table = classifiers_;
  }
  auto it = table->find(airport_id);
  return it == table->end() ? nullptr : it->second;
}

bool AirportService::has_classifier(const std::string& airport_id) const { return classifier(airport_id) != nullptr; }

std::string AirportService::predict_rc(const std::string& airport_id, const metar::WeatherObservation& weather) const {
  const auto model = classifier(airport_id);
  if (!model) throw Error(ErrorCode::NoClassifier, "no runway-configuration classifier for " + airport_id);
  return ml::predict_class(*model, pipeline::rc_features(weather)).name;
}

void AirportService::set_health_gate(std::function<bool()> gate) {
  std::lock_guard lock(mu_);
  gate_ = gate ? std::make_shared<const std::function<bool()>>(std::move(gate)) : nullptr;
}

CapacityPrediction AirportService::predict_capacity(const std::string& airport_id, EpochSeconds bucket_start,
                                                    const metar::WeatherObservation& weather) const {
  const auto& topo = topology(airport_id);
  CapacityPrediction out;
  out.airport_id = airport_id;
  out.bucket_start = bucket_start;
  out.rc = predict_rc(airport_id, weather);
  const auto& rc = topo.config(out.rc);

  std::shared_ptr<const std::function<bool()>> gate;
  {
    std::lock_guard lock(mu_);
    gate = gate_;
  }
  bool up = true;
  if (gate) {
    try {
      up = (*gate)();
    } catch (...) {
      up = false;
    }
  }
  if (up) {
    try {
      double arrivals = 0.0;
      double departures = 0.0;
      for (const auto& s : topo.arrival_sectors(rc)) {
        arrivals += sectors_.predict(s, pipeline::Target::Exits, bucket_start, weather);
        out.contributing_sectors.push_back(s);
      }
      for (const auto& s : topo.departure_sectors(rc)) {
        departures += sectors_.predict(s, pipeline::Target::Entries, bucket_start, weather);
        out.contributing_sectors.push_back(s);
      }
      out.arrivals = arrivals;
      out.departures = departures;
      return out;
    } catch (...) {
      // fall through to the static table
    }
  }
  out.degraded = true;
  out.contributing_sectors.clear();
  auto it = topo.static_capacity.find(out.rc);
  if (it != topo.static_capacity.end()) {
    out.arrivals = it->second.arrivals;
    out.departures = it->second.departures;
  }
  return out;
}

AirportEvaluation AirportService::evaluate_airport(const std::string& airport_id, const DateRange& range,
                                                   int histogram_bins) const {
  if (range.last < range.first) throw Error(ErrorCode::EmptyRange, range.to_string());
  const auto& topo = topology(airport_id);
  if (store_ == nullptr) throw Error(ErrorCode::NotPrepared, "airport evaluation needs a store");
  const auto weather = pipeline::load_weather(*store_, range);

  AirportEvaluation ev;
  ev.airport_id = airport_id;
  for (const Date d : range.days()) {
    const auto actual = pipeline::airport_flows(*store_, airport_id, d);
    eval::EvaluationSeries arr;
    eval::EvaluationSeries dep;
    for (const auto& b : actual) {
      const auto* obs = weather.latest(topo.station, b.bucket_start);
      if (obs == nullptr || b.bucket_start - *obs->obs_time > pipeline::kWeatherHorizon) {
        throw Error(ErrorCode::NoWeather, "no weather from " + topo.station + " for " + format_iso(b.bucket_start));
      }
      const auto cap = predict_capacity(airport_id, b.bucket_start, *obs);
      ev.rows.push_back({b.bucket_start, static_cast<double>(b.arrivals), cap.arrivals,
                         static_cast<double>(b.departures), cap.departures, cap.degraded});
      arr.y.push_back(b.arrivals);
      arr.predictions.push_back(cap.arrivals);
      dep.y.push_back(b.departures);
      dep.predictions.push_back(cap.departures);
    }
    ev.arrival_day_scores.push_back(eval::score(arr));
    ev.departure_day_scores.push_back(eval::score(dep));
  }
  const auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  ev.mean_arrival_score = mean(ev.arrival_day_scores);
  ev.mean_departure_score = mean(ev.departure_day_scores);
  ev.arrival_histogram = eval::score_histogram(ev.arrival_day_scores, histogram_bins);
  ev.departure_histogram = eval::score_histogram(ev.departure_day_scores, histogram_bins);
  return ev;
}

std::vector<std::pair<metar::WeatherObservation, std::string>> rc_history(const store::Store& store,
                                                                          const PlatformConfig& config,
                                                                          const std::string& airport_id,
                                                                          const DateRange& range) {
  const auto* topo = config.find_airport(airport_id);
  if (topo == nullptr) throw Error(ErrorCode::NoTopology, "no topology for airport " + airport_id);
  const auto weather = pipeline::load_weather(store, range);
  std::vector<std::pair<metar::WeatherObservation, std::string>> out;
  for (const Date d : range.days()) {
    for (const auto& r : store.read_rc(d)) {
      if (r.airport != airport_id) continue;
      const auto* obs = weather.latest(topo->station, r.ts);
      if (obs == nullptr) continue;
      out.emplace_back(*obs, r.rc);
    }
  }
  return out;
}

std::string airport_timeseries_csv(const AirportEvaluation& ev) {
  std::string out = "bucket_start,actual_arr,pred_arr,actual_dep,pred_dep\n";
  for (const auto& r : ev.rows) {
    out += format_iso(r.bucket_start) + ',' + fmt6(r.actual_arr) + ',' + fmt6(r.pred_arr) + ',' + fmt6(r.actual_dep) +
           ',' + fmt6(r.pred_dep) + '\n';
  }
  return out;
}

}  // namespace aeroflow::services
