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

#include "aeroflow/mesh/registry.hpp"

#include <cstdio>
#include <set>

#include "aeroflow/core/error.hpp"
#include "aeroflow/core/fileio.hpp"

namespace aeroflow::mesh {

std::string_view to_string(Layer l) noexcept {
  switch (l) {
    case Layer::InputProcessing: return "input_processing";
    case Layer::MicroService: return "micro_service";
    case Layer::HigherLevel: return "higher_level";
  }
  return "?";
}

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::Up: return "UP";
    case Status::Down: return "DOWN";
    case Status::Degraded: return "DEGRADED";
  }
  return "?";
}

Layer parse_layer(std::string_view s) {
  if (s == "input_processing") return Layer::InputProcessing;
  if (s == "micro_service") return Layer::MicroService;
  if (s == "higher_level") return Layer::HigherLevel;
  throw Error(ErrorCode::BadConfig, "unknown layer '" + std::string(s) + "'");
}

Status parse_status(std::string_view s) {
  if (s == "UP") return Status::Up;
  if (s == "DOWN") return Status::Down;
  if (s == "DEGRADED") return Status::Degraded;
  throw Error(ErrorCode::BadConfig, "unknown status '" + std::string(s) + "'");
}

nlohmann::ordered_json to_json(const ServiceDescriptor& d) {
  nlohmann::ordered_json j;
  j["name"] = d.name;
  j["version"] = d.version;
  j["layer"] = to_string(d.layer);
  j["endpoint"] = d.host + ":" + std::to_string(d.port) + d.base_path;
  j["dependencies"] = d.dependencies;
  j["status"] = to_string(d.status);
  return j;
}

ServiceDescriptor descriptor_from_json(const nlohmann::json& j) {
  try {
    ServiceDescriptor d;
    d.name = j.at("name").get<std::string>();
    d.version = j.at("version").get<std::string>();
    d.layer = parse_layer(j.at("layer").get<std::string>());
    const auto endpoint = j.at("endpoint").get<std::string>();
    const auto colon = endpoint.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::BadConfig, "endpoint without port: " + endpoint);
    d.host = endpoint.substr(0, colon);
    const auto rest = endpoint.substr(colon + 1);
    const auto slash = rest.find('/');
    d.port = std::stoi(rest.substr(0, slash));
    if (slash != std::string::npos) d.base_path = rest.substr(slash);
    d.dependencies = j.at("dependencies").get<std::vector<std::string>>();
    d.status = parse_status(j.at("status").get<std::string>());
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("service descriptor: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::BadConfig, std::string("service descriptor: ") + e.what());
  }
}

Registry::Registry(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(*path_)) return;
  const auto j = nlohmann::json::parse(read_text(*path_));
  next_id_ = j.at("next_id").get<std::uint64_t>();
  for (const auto& s : j.at("services")) {
    auto d = descriptor_from_json(s);
    services_[d.name] = std::move(d);
  }
}

std::string Registry::register_service(ServiceDescriptor d) {
  std::lock_guard lock(mu_);
  auto next = services_;
  next[d.name] = d;
  for (const auto& dep : d.dependencies) {
    auto it = next.find(dep);
    if (it != next.end() && static_cast<int>(it->second.layer) > static_cast<int>(d.layer)) {
      throw Error(ErrorCode::LayerViolation, d.name + " (" + std::string(to_string(d.layer)) + ") may not depend on " +
                                                 dep + " (" + std::string(to_string(it->second.layer)) + ")");
    }
  }
  for (const auto& [name, s] : next) {
    for (const auto& dep : s.dependencies) {
      if (dep != d.name) continue;
      if (static_cast<int>(d.layer) > static_cast<int>(s.layer)) {
        throw Error(ErrorCode::LayerViolation, name + " may not depend on higher-layer " + d.name);
      }
    }
  }
  // Depth-first search for a back edge; unregistered dependencies are leaves.
  std::map<std::string, int> colour;  // 0 new, 1 on stack, 2 done
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    colour[n] = 1;
    auto it = next.find(n);
    if (it != next.end()) {
      for (const auto& dep : it->second.dependencies) {
        if (colour[dep] == 1) throw Error(ErrorCode::CycleDetected, n + " -> " + dep + " closes a cycle");
        if (colour[dep] == 0) visit(dep);
      }
    }
    colour[n] = 2;
  };
  for (const auto& [name, s] : next) {
    if (colour[name] == 0) visit(name);
  }
  services_ = std::move(next);
  char id[32];
  std::snprintf(id, sizeof id, "reg-%06llu", static_cast<unsigned long long>(next_id_++));
  persist_locked();
  return id;
}

ServiceDescriptor Registry::resolve(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = services_.find(name);
  if (it == services_.end()) throw Error(ErrorCode::UnknownService, name);
  return it->second;
}

Status Registry::health(const std::string& name) const { return resolve(name).status; }

void Registry::set_status(const std::string& name, Status s) {
  std::lock_guard lock(mu_);
  auto it = services_.find(name);
  if (it == services_.end()) throw Error(ErrorCode::UnknownService, name);
  it->second.status = s;
}

void Registry::publish_statuses(const std::map<std::string, Status>& statuses) {
  std::lock_guard lock(mu_);
  for (const auto& [name, s] : statuses) {
    auto it = services_.find(name);
    if (it != services_.end()) it->second.status = s;
  }
}

std::vector<ServiceDescriptor> Registry::services() const {
  std::lock_guard lock(mu_);
  std::vector<ServiceDescriptor> out;
  for (const auto& [_, d] : services_) out.push_back(d);
  return out;
}

void Registry::persist_locked() const {
  if (!path_) return;
  nlohmann::ordered_json j;
  j["next_id"] = next_id_;
  j["services"] = nlohmann::ordered_json::array();
  for (const auto& [_, d] : services_) j["services"].push_back(to_json(d));
  write_atomic(*path_, j.dump(2) + "\n");
}

HealthProber::HealthProber(Registry& registry, std::chrono::milliseconds interval, int failure_threshold)
    : registry_(registry), interval_(interval), threshold_(failure_threshold) {}

HealthProber::~HealthProber() { stop(); }

void HealthProber::add_probe(const std::string& service, Probe probe) {
  std::lock_guard lock(mu_);
  probes_[service] = std::move(probe);
  failures_[service] = 0;
}

void HealthProber::probe_once() {
  std::map<std::string, Probe> probes;
  {
    std::lock_guard lock(mu_);
    probes = probes_;
  }
  std::map<std::string, bool> ok;
  for (const auto& [name, probe] : probes) {
    bool r = false;
    try {
      r = probe();
    } catch (...) {
      r = false;
    }
    ok[name] = r;
  }
  std::map<std::string, Status> own;
  {
    std::lock_guard lock(mu_);
    for (const auto& [name, r] : ok) {
      int& f = failures_[name];
      f = r ? 0 : f + 1;
      own[name] = f >= threshold_ ? Status::Down : Status::Up;
    }
  }
  const auto all = registry_.services();
  std::map<std::string, Status> next;
  for (const auto& d : all) {
    auto it = own.find(d.name);
    next[d.name] = it == own.end() ? (d.status == Status::Down ? Status::Down : Status::Up) : it->second;
  }
  for (const auto& d : all) {
    if (next[d.name] != Status::Up) continue;
    for (const auto& dep : d.dependencies) {
      auto it = next.find(dep);
      if (it != next.end() && it->second == Status::Down) next[d.name] = Status::Degraded;
    }
  }
  registry_.publish_statuses(next);
}

void HealthProber::start() {
  std::lock_guard lock(run_mu_);
  if (running_) return;
  running_ = true;
  thread_ = std::thread([this] {
    std::unique_lock lk(run_mu_);
    while (running_) {
      lk.unlock();
      probe_once();
      lk.lock();
      cv_.wait_for(lk, interval_, [this] { return !running_; });
    }
  });
}

void HealthProber::stop() {
  {
    std::lock_guard lock(run_mu_);
    if (!running_) return;
    running_ = false;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

}  // namespace aeroflow::mesh
