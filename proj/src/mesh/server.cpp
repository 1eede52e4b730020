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

#include "aeroflow/mesh/server.hpp"

#include <cstdio>
#include <cstdlib>
#include <set>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "aeroflow/core/error.hpp"

namespace aeroflow::mesh {

using ojson = nlohmann::ordered_json;

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

double wire_value(double v) { return std::strtod(format_value(v).c_str(), nullptr); }

ServeConfig serve_config_from_yaml(const YAML::Node& node) {
  try {
    ServeConfig c;
    if (!node["store"]) throw Error(ErrorCode::BadConfig, "serve config needs 'store'");
    c.store_dir = node["store"].as<std::string>();
    if (node["host"]) c.host = node["host"].as<std::string>();
    if (node["port"]) c.port = node["port"].as<int>();
    if (node["probe_interval_s"]) {
      c.probe_interval = std::chrono::milliseconds(static_cast<long>(node["probe_interval_s"].as<double>() * 1000.0));
    }
    if (node["failure_threshold"]) c.failure_threshold = node["failure_threshold"].as<int>();
    if (const auto r = node["remote_sectors"]) {
      c.remote_sectors = RemoteEndpoint{r["host"].as<std::string>("127.0.0.1"), r["port"].as<int>()};
    }
    if (node["registry_file"]) c.registry_file = node["registry_file"].as<std::string>();
    if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::BadConfig, "port out of range");
    if (c.failure_threshold < 1) throw Error(ErrorCode::BadConfig, "failure_threshold must be >= 1");
    if (c.probe_interval.count() <= 0) throw Error(ErrorCode::BadConfig, "probe_interval_s must be positive");
    return c;
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("serve config: ") + e.what());
  }
}

ServeConfig load_serve_config(const std::filesystem::path& path) {
  try {
    return serve_config_from_yaml(YAML::LoadFile(path.string()));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::BadConfig, path.string() + ": " + e.what());
  }
}

HttpSectorSource::HttpSectorSource(RemoteEndpoint endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {}

double HttpSectorSource::predict(const std::string& sector_id, pipeline::Target target, EpochSeconds bucket_start,
                                 const metar::WeatherObservation&) {
  httplib::Client cli(endpoint_.host, endpoint_.port);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  const auto path = "/v1/sectors/" + sector_id + "/prediction?target=" + std::string(pipeline::to_string(target)) +
                    "&from=" + format_iso(bucket_start) + "&to=" + format_iso(bucket_start + kBucketSeconds);
  auto res = cli.Get(path);
  if (!res) throw Error(ErrorCode::NoPredictor, "sector service unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error(ErrorCode::NoPredictor, "sector service returned " + std::to_string(res->status));
  const auto j = nlohmann::json::parse(res->body);
  return j.at("points").at(0).at("value").get<double>();
}

bool HttpSectorSource::healthy() const {
  httplib::Client cli(endpoint_.host, endpoint_.port);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  auto res = cli.Get("/v1/health");
  return res && res->status == 200;
}

ojson error_body(ErrorCode code, const std::string& message) {
  ojson j;
  j["error"]["code"] = to_string(code);
  j["error"]["message"] = message;
  return j;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::FormatError:
    case ErrorCode::BadConfig:
    case ErrorCode::EmptyRange:
    case ErrorCode::ValidationError:
      return 400;
    case ErrorCode::NotFound:
    case ErrorCode::NoPredictor:
    case ErrorCode::NoClassifier:
    case ErrorCode::NoTopology:
    case ErrorCode::UnknownService:
      return 404;
    case ErrorCode::NoWeather:
    case ErrorCode::NotPrepared:
    case ErrorCode::RawMissing:
    case ErrorCode::InsufficientData:
    case ErrorCode::AllCandidatesFailed:
      return 422;
    case ErrorCode::MissingModels:
      return 503;
    default:
      return 500;
  }
}

namespace {

void reply(httplib::Response& res, int status, const ojson& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, const Error& e) {
  // what() carries "Code: detail"; the body repeats only the detail.
  std::string msg = e.what();
  const auto prefix = std::string(to_string(e.code())) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  reply(res, http_status(e.code()), error_body(e.code(), msg));
}

std::string required_param(const httplib::Request& req, const std::string& name) {
  if (!req.has_param(name)) throw Error(ErrorCode::FormatError, "missing query parameter '" + name + "'");
  return req.get_param_value(name);
}

std::pair<EpochSeconds, EpochSeconds> parse_window(const httplib::Request& req) {
  const auto from = parse_iso(required_param(req, "from"));
  const auto to = parse_iso(required_param(req, "to"));
  if (!bucket_aligned(from) || !bucket_aligned(to) || to < from) {
    throw Error(ErrorCode::BadConfig, "from/to must be 15-minute aligned with from <= to");
  }
  return {from, to};
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      reply_error(res, e);
    } catch (const nlohmann::json::exception& e) {
      reply(res, 400, error_body(ErrorCode::FormatError, e.what()));
    } catch (const std::exception& e) {
      reply(res, 500, error_body(ErrorCode::ValidationError, e.what()));
    }
  };
}

}  // namespace

MeshServer::MeshServer(ServeConfig config) : config_(std::move(config)) {
  store_ = std::make_unique<store::Store>(config_.store_dir);
  registry_ = config_.registry_file ? std::make_unique<Registry>(*config_.registry_file) : std::make_unique<Registry>();
  prober_ = std::make_unique<HealthProber>(*registry_, config_.probe_interval, config_.failure_threshold);
  const auto platform = store_->has_platform() ? store_->platform() : services::PlatformConfig{};
  sectors_ = std::make_unique<services::SectorService>(platform, store_.get());
  if (config_.remote_sectors) {
    source_ = std::make_unique<HttpSectorSource>(*config_.remote_sectors);
  } else {
    source_ = std::make_unique<services::InProcessSectorSource>(*sectors_);
  }
  airports_ = std::make_unique<services::AirportService>(platform, *source_, store_.get());
  const auto sectors_loaded = sectors_->load_published();
  const auto airports_loaded = airports_->load_published();
  spdlog::info("loaded {} sector predictors and {} runway classifiers", sectors_loaded, airports_loaded);

  auto& reg = *registry_;
  const std::string version = "1.0.0";
  reg.register_service({kIngest, version, Layer::InputProcessing, config_.host, config_.port, "/v1", {}, Status::Up});
  if (!config_.remote_sectors) {
    reg.register_service(
        {kSectorService, version, Layer::MicroService, config_.host, config_.port, "/v1/sectors", {kIngest}, Status::Up});
    prober_->add_probe(kSectorService, [] { return true; });
  } else {
    const auto& r = *config_.remote_sectors;
    reg.register_service(
        {kSectorService, version, Layer::MicroService, r.host, r.port, "/v1/sectors", {kIngest}, Status::Up});
    auto* remote = static_cast<HttpSectorSource*>(source_.get());
    prober_->add_probe(kSectorService, [remote] { return remote->healthy(); });
  }
  reg.register_service({kAirportService, version, Layer::HigherLevel, config_.host, config_.port, "/v1/airports",
                        {kSectorService}, Status::Up});
  prober_->add_probe(kAirportService, [] { return true; });
  airports_->set_health_gate([&reg] { return reg.health(kSectorService) != Status::Down; });

  http_ = std::make_unique<httplib::Server>();
  install_routes();
}

MeshServer::~MeshServer() { stop(); }

pipeline::WeatherSource MeshServer::weather_for(EpochSeconds from, EpochSeconds to) {
  const Date last = date_of(to > from ? to - 1 : from);
  return pipeline::load_weather(*store_, DateRange{date_of(from), last});
}

std::vector<std::string> MeshServer::missing_models() const {
  std::vector<std::string> missing;
  const auto& cfg = sectors_->config();
  std::set<std::string> need_entries;
  std::set<std::string> need_exits;
  for (const auto& a : cfg.airports) {
    for (const auto& r : a.runways) {
      need_exits.insert(r.arrival_sectors.begin(), r.arrival_sectors.end());
      need_entries.insert(r.departure_sectors.begin(), r.departure_sectors.end());
    }
  }
  for (const auto& s : cfg.sectors) {
    if (!sectors_->predictor(s.id, pipeline::Target::Occupancy)) missing.push_back(s.id + "/occupancy");
    if (need_entries.count(s.id) && !sectors_->predictor(s.id, pipeline::Target::Entries)) {
      missing.push_back(s.id + "/entries");
    }
    if (need_exits.count(s.id) && !sectors_->predictor(s.id, pipeline::Target::Exits)) {
      missing.push_back(s.id + "/exits");
    }
  }
  for (const auto& a : cfg.airports) {
    if (!airports_->has_classifier(a.airport_id)) missing.push_back(a.airport_id + "/rc");
  }
  return missing;
}

ojson MeshServer::health_json() const {
  ojson j;
  const auto services = registry_->services();
  bool all_up = true;
  for (const auto& d : services) all_up = all_up && d.status == Status::Up;
  const auto missing = missing_models();
  j["status"] = all_up ? "UP" : "DEGRADED";
  j["readiness"] = missing.empty();
  j["missing_models"] = missing;
  j["services"] = ojson::array();
  for (const auto& d : services) j["services"].push_back(to_json(d));
  return j;
}

void MeshServer::install_routes() {
  auto& svr = *http_;

  svr.Get("/v1/health", guarded([this](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, health_json());
          }));

  svr.Get("/v1/sectors/:id/prediction", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto id = req.path_params.at("id");
            const auto target = pipeline::parse_target(req.has_param("target") ? req.get_param_value("target")
                                                                               : std::string("occupancy"));
            const auto [from, to] = parse_window(req);
            if (sectors_->config().find_sector(id) == nullptr) throw Error(ErrorCode::NoPredictor, "unknown sector " + id);
            const auto values = sectors_->predict_horizon(id, target, from, to, weather_for(from, to));
            ojson body;
            body["sector"] = id;
            body["target"] = pipeline::to_string(target);
            body["points"] = ojson::array();
            for (const auto& [t, v] : values) {
              ojson p;
              p["bucket"] = format_iso(t);
              p["value"] = wire_value(v);
              body["points"].push_back(std::move(p));
            }
            reply(res, 200, body);
          }));

  svr.Get("/v1/airports/:id/capacity", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto id = req.path_params.at("id");
            const auto [from, to] = parse_window(req);
            const auto* topo = airports_->config().find_airport(id);
            if (topo == nullptr) throw Error(ErrorCode::NoTopology, "no topology for airport " + id);
            const auto weather = weather_for(from, to);
            ojson body;
            body["airport"] = id;
            body["points"] = ojson::array();
            for (EpochSeconds t = from; t < to; t += kBucketSeconds) {
              const auto* obs = weather.latest(topo->station, t);
              if (obs == nullptr || t - *obs->obs_time > pipeline::kWeatherHorizon) {
                throw Error(ErrorCode::NoWeather, "no weather from " + topo->station + " for " + format_iso(t));
              }
              const auto cap = airports_->predict_capacity(id, t, *obs);
              ojson p;
              p["bucket"] = format_iso(t);
              p["rc"] = cap.rc;
              p["arrivals"] = wire_value(cap.arrivals);
              p["departures"] = wire_value(cap.departures);
              p["degraded"] = cap.degraded;
              body["points"].push_back(std::move(p));
            }
            reply(res, 200, body);
          }));

  svr.Post("/v1/admin/retrain", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto j = nlohmann::json::parse(req.body);
             if (!j.contains("range")) throw Error(ErrorCode::FormatError, "retrain body needs 'range'");
             const auto range = parse_range(j.at("range").get<std::string>());
             std::lock_guard lock(retrain_mu_);
             ojson body;
             if (j.contains("sector")) {
               const auto target =
                   pipeline::parse_target(j.contains("target") ? j.at("target").get<std::string>() : "occupancy");
               const auto out = sectors_->train_sector(j.at("sector").get<std::string>(), target, range);
               body["model_id"] = out.predictor.model_id;
               body["cv_score"] = wire_value(out.predictor.cv_score);
             } else if (j.contains("airport")) {
               const auto id = j.at("airport").get<std::string>();
               const auto history = services::rc_history(*store_, airports_->config(), id, range);
               const auto out = airports_->train_rc_classifier(id, history);
               body["model_id"] = out.model_id;
               body["cv_score"] = wire_value(out.cv_accuracy);
             } else {
               throw Error(ErrorCode::FormatError, "retrain body needs 'sector' or 'airport'");
             }
             reply(res, 200, body);
           }));
}

void MeshServer::start() {
  if (thread_.joinable()) return;
  // Address reuse only: a second live listener on the same port must fail.
  http_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
  });
  if (config_.port == 0) {
    port_ = http_->bind_to_any_port(config_.host);
    if (port_ <= 0) throw Error(ErrorCode::PortInUse, "could not bind " + config_.host);
    for (auto d : registry_->services()) {
      if (d.port != 0 || d.host != config_.host) continue;
      d.port = port_;
      registry_->register_service(d);
    }
  } else {
    if (!http_->bind_to_port(config_.host, config_.port)) {
      throw Error(ErrorCode::PortInUse, config_.host + ":" + std::to_string(config_.port));
    }
    port_ = config_.port;
  }
  prober_->probe_once();
  prober_->start();
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  spdlog::info("serving on {}:{}", config_.host, port_);
}

void MeshServer::stop() {
  if (prober_) prober_->stop();
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

void MeshServer::wait() {
  if (thread_.joinable()) thread_.join();
}

}  // namespace aeroflow::mesh
