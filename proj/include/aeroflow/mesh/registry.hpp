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
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace aeroflow::mesh {

enum class Layer { InputProcessing, MicroService, HigherLevel };
enum class Status { Up, Down, Degraded };

std::string_view to_string(Layer l) noexcept;
std::string_view to_string(Status s) noexcept;
/// Throw Error{BadConfig}.
Layer parse_layer(std::string_view s);
Status parse_status(std::string_view s);

struct ServiceDescriptor {
  std::string name;
  std::string version;
  Layer layer = Layer::MicroService;
  std::string host;
  int port = 0;
  std::string base_path;
  std::vector<std::string> dependencies;
  Status status = Status::Up;

  bool operator==(const ServiceDescriptor&) const = default;
};

nlohmann::ordered_json to_json(const ServiceDescriptor& d);
ServiceDescriptor descriptor_from_json(const nlohmann::json& j);

/// In-process service registry. All mutations are serialized; readers get
/// copies.
class Registry {
 public:
  Registry() = default;
  /// Persists every registration to `path` and reloads it when present.
  explicit Registry(std::filesystem::path path);

  /// Re-registering a name replaces it. Throws Error{CycleDetected} when the
  /// dependency graph would gain a cycle and Error{LayerViolation} when a
  /// service depends on a service of a higher layer. Returns "reg-NNNNNN".
  std::string register_service(ServiceDescriptor d);
  /// Throws Error{UnknownService}.
  ServiceDescriptor resolve(const std::string& name) const;
  Status health(const std::string& name) const;
  void set_status(const std::string& name, Status s);
  /// Applies a whole probe round under one lock; unknown names are ignored.
  void publish_statuses(const std::map<std::string, Status>& statuses);
  std::vector<ServiceDescriptor> services() const;  // name order

 private:
  void persist_locked() const;

  mutable std::mutex mu_;
  std::map<std::string, ServiceDescriptor> services_;
  std::uint64_t next_id_ = 1;
  std::optional<std::filesystem::path> path_;
};

/// Periodic health prober. A service whose probe fails `failure_threshold`
/// times in a row goes DOWN; one success brings it back UP. A service that is
/// itself up but depends on a DOWN service is DEGRADED. All statuses of one
/// round are published to the registry together.
class HealthProber {
 public:
  using Probe = std::function<bool()>;

  HealthProber(Registry& registry, std::chrono::milliseconds interval = std::chrono::seconds(10),
               int failure_threshold = 2);
  ~HealthProber();
  HealthProber(const HealthProber&) = delete;
  HealthProber& operator=(const HealthProber&) = delete;

  void add_probe(const std::string& service, Probe probe);
  void probe_once();
  void start();
  void stop();
  std::chrono::milliseconds interval() const { return interval_; }

 private:
  Registry& registry_;
  std::chrono::milliseconds interval_;
  int threshold_;
  std::mutex mu_;  // probes_ and failures_
  std::map<std::string, Probe> probes_;
  std::map<std::string, int> failures_;
  std::mutex run_mu_;
  std::condition_variable cv_;
  bool running_ = false;
  std::thread thread_;
};

}  // namespace aeroflow::mesh
