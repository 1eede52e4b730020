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

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "aeroflow/mesh/registry.hpp"
#include "aeroflow/services/airport_service.hpp"
#include "aeroflow/services/sector_service.hpp"
#include "aeroflow/store/store.hpp"

namespace httplib {
class Server;
}

namespace aeroflow::mesh {

/// Wire form of a prediction: fixed point with 4 fractional digits. The
/// decimal is the correctly rounded value of the binary double, so an exact
/// binary tie rounds half to even. Clients reproduce a wire value by parsing
/// this string.
std::string format_value(double v);
double wire_value(double v);

struct RemoteEndpoint {
  std::string host;
  int port = 0;
};

struct ServeConfig {
  std::filesystem::path store_dir;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::chrono::milliseconds probe_interval{10000};
  int failure_threshold = 2;
  std::optional<RemoteEndpoint> remote_sectors;  // consume another process's sector service
  std::optional<std::filesystem::path> registry_file;
};

/// Keys: store, host, port, probe_interval_s, failure_threshold,
/// remote_sectors{host, port}, registry_file. Throws Error{BadConfig}.
ServeConfig serve_config_from_yaml(const YAML::Node& node);
ServeConfig load_serve_config(const std::filesystem::path& path);

/// Sector predictions fetched over HTTP from a remote sector service. The
/// remote side uses its own weather store; the weather argument is ignored.
class HttpSectorSource : public services::SectorSource {
 public:
  explicit HttpSectorSource(RemoteEndpoint endpoint, std::chrono::milliseconds timeout = std::chrono::seconds(2));
  double predict(const std::string& sector_id, pipeline::Target target, EpochSeconds bucket_start,
                 const metar::WeatherObservation& weather) override;
  bool healthy() const;

 private:
  RemoteEndpoint endpoint_;
  std::chrono::milliseconds timeout_;
};

/// Structured error body: {"error": {"code": ..., "message": ...}}.
nlohmann::ordered_json error_body(ErrorCode code, const std::string& message);
int http_status(ErrorCode code);

/// The single-node mesh: a store, the sector and airport services, a registry
/// with health probing and the HTTP endpoints.
class MeshServer {
 public:
  static constexpr const char* kIngest = "metar-ingest";
  static constexpr const char* kSectorService = "sector-service";
  static constexpr const char* kAirportService = "airport-service";

  explicit MeshServer(ServeConfig config);
  ~MeshServer();
  MeshServer(const MeshServer&) = delete;
  MeshServer& operator=(const MeshServer&) = delete;

  /// Binds and serves on a background thread. Throws Error{PortInUse}.
  void start();
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();
  int port() const { return port_; }

  /// Models that are expected but not published, as "sector/target" or
  /// "airport/rc".
  std::vector<std::string> missing_models() const;
  nlohmann::ordered_json health_json() const;

  store::Store& store() { return *store_; }
  Registry& registry() { return *registry_; }
  HealthProber& prober() { return *prober_; }
  services::SectorService& sectors() { return *sectors_; }
  services::AirportService& airports() { return *airports_; }
  /// Weather for buckets in [from, to), including the day before.
  pipeline::WeatherSource weather_for(EpochSeconds from, EpochSeconds to);

 private:
  void install_routes();

  ServeConfig config_;
  std::unique_ptr<store::Store> store_;
  std::unique_ptr<Registry> registry_;
  std::unique_ptr<HealthProber> prober_;
  std::unique_ptr<services::SectorService> sectors_;
  std::unique_ptr<services::SectorSource> source_;
  std::unique_ptr<services::AirportService> airports_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  int port_ = 0;
  std::mutex retrain_mu_;
};

}  // namespace aeroflow::mesh
