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

#include <gtest/gtest.h>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <thread>
#include <yaml-cpp/yaml.h>

#include "aeroflow/core/error.hpp"
#include "aeroflow/mesh/registry.hpp"
#include "aeroflow/mesh/server.hpp"
#include "support.hpp"

namespace aeroflow::mesh {
namespace {

using namespace std::chrono_literals;

ServiceDescriptor svc(const std::string& name, Layer layer, std::vector<std::string> deps = {}) {
  return {name, "1", layer, "127.0.0.1", 1000, "/" + name, std::move(deps), Status::Up};
}

TEST(Registry, RegisterResolveAndReplace) {
  Registry r;
  EXPECT_EQ(r.register_service(svc("ingest", Layer::InputProcessing)), "reg-000001");
  EXPECT_EQ(r.register_service(svc("sector", Layer::MicroService, {"ingest"})), "reg-000002");
  EXPECT_EQ(r.resolve("sector").dependencies, std::vector<std::string>{"ingest"});
  auto moved = svc("sector", Layer::MicroService, {"ingest"});
  moved.port = 2000;
  r.register_service(moved);
  EXPECT_EQ(r.resolve("sector").port, 2000);
  EXPECT_EQ(r.services().size(), 2u);
  try {
    r.resolve("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownService);
  }
  EXPECT_THROW(r.health("nope"), Error);
  EXPECT_EQ(descriptor_from_json(nlohmann::json::parse(to_json(moved).dump())), moved);
}

TEST(Registry, RejectsCyclesAndLayerInversions) {
  Registry r;
  r.register_service(svc("a", Layer::MicroService, {"b"}));
  r.register_service(svc("b", Layer::MicroService, {"c"}));
  try {
    r.register_service(svc("c", Layer::MicroService, {"a"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CycleDetected);
  }
  EXPECT_THROW(r.register_service(svc("self", Layer::MicroService, {"self"})), Error);
  r.register_service(svc("top", Layer::HigherLevel));
  try {
    r.register_service(svc("low", Layer::MicroService, {"top"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LayerViolation);
  }
  // The dependency registered later than its dependent is checked too.
  r.register_service(svc("ingest", Layer::InputProcessing, {"later"}));
  EXPECT_THROW(r.register_service(svc("later", Layer::HigherLevel)), Error);
  EXPECT_THROW(r.resolve("later"), Error);  // failed registrations leave no trace
  EXPECT_EQ(parse_layer(to_string(Layer::HigherLevel)), Layer::HigherLevel);
  EXPECT_THROW(parse_status("SIDEWAYS"), Error);
}

TEST(Registry, PersistsAcrossInstances) {
  testing::TempDir dir;
  {
    Registry r(dir / "registry.json");
    r.register_service(svc("ingest", Layer::InputProcessing));
    r.register_service(svc("sector", Layer::MicroService, {"ingest"}));
    r.set_status("sector", Status::Down);
  }
  Registry again(dir / "registry.json");
  EXPECT_EQ(again.services().size(), 2u);
  EXPECT_EQ(again.health("sector"), Status::Up);  // health is runtime state, never persisted
  EXPECT_EQ(again.register_service(svc("airport", Layer::HigherLevel, {"sector"})), "reg-000003");
}

TEST(Prober, DownAfterThresholdDegradedDependents) {
  Registry r;
  r.register_service(svc("ingest", Layer::InputProcessing));
  r.register_service(svc("sector", Layer::MicroService, {"ingest"}));
  r.register_service(svc("airport", Layer::HigherLevel, {"sector"}));
  HealthProber p(r, 1h, 2);
  bool sector_ok = true;
  p.add_probe("sector", [&] { return sector_ok; });
  p.add_probe("airport", [] { return true; });
  p.probe_once();
  EXPECT_EQ(r.health("sector"), Status::Up);
  sector_ok = false;
  p.probe_once();
  EXPECT_EQ(r.health("sector"), Status::Up);  // one failure is tolerated
  p.probe_once();
  EXPECT_EQ(r.health("sector"), Status::Down);
  EXPECT_EQ(r.health("airport"), Status::Degraded);
  EXPECT_EQ(r.health("ingest"), Status::Up);
  sector_ok = true;
  p.probe_once();
  EXPECT_EQ(r.health("sector"), Status::Up);
  EXPECT_EQ(r.health("airport"), Status::Up);
  p.add_probe("ingest", [] () -> bool { throw std::runtime_error("probe exploded"); });
  p.probe_once();
  p.probe_once();
  EXPECT_EQ(r.health("ingest"), Status::Down);
  EXPECT_EQ(r.health("sector"), Status::Degraded);
}

TEST(Prober, BackgroundThread) {
  Registry r;
  r.register_service(svc("sector", Layer::MicroService));
  HealthProber p(r, 10ms, 2);
  std::atomic<bool> ok{false};
  p.add_probe("sector", [&] { return ok.load(); });
  p.start();
  for (int i = 0; i < 200 && r.health("sector") != Status::Down; ++i) std::this_thread::sleep_for(5ms);
  EXPECT_EQ(r.health("sector"), Status::Down);
  ok = true;
  for (int i = 0; i < 200 && r.health("sector") != Status::Up; ++i) std::this_thread::sleep_for(5ms);
  EXPECT_EQ(r.health("sector"), Status::Up);
  p.stop();
}

TEST(Wire, FourDigitSerialization) {
  EXPECT_EQ(format_value(1.23456), "1.2346");
  EXPECT_EQ(format_value(0.0), "0.0000");
  EXPECT_EQ(format_value(2.5), "2.5000");
  EXPECT_EQ(format_value(0.00005), "0.0001");   // stored just above the tie
  EXPECT_EQ(format_value(0.03125), "0.0312");   // exact binary tie goes to even
  EXPECT_EQ(wire_value(12.34567), 12.3457);
}

TEST(Wire, StatusMapping) {
  EXPECT_EQ(http_status(ErrorCode::BadConfig), 400);
  EXPECT_EQ(http_status(ErrorCode::NoPredictor), 404);
  EXPECT_EQ(http_status(ErrorCode::NoWeather), 422);
  EXPECT_EQ(http_status(ErrorCode::MissingModels), 503);
  EXPECT_EQ(http_status(ErrorCode::StorageFull), 500);
  const auto body = error_body(ErrorCode::NoPredictor, "S1");
  EXPECT_EQ(body.dump(), "{\"error\":{\"code\":\"NoPredictor\",\"message\":\"S1\"}}");
}

TEST(ServeConfig, Yaml) {
  const auto c = serve_config_from_yaml(YAML::Load(
      "store: /tmp/x\nport: 0\nprobe_interval_s: 0.5\nfailure_threshold: 3\nremote_sectors: {host: 10.0.0.1, port: 9000}\n"));
  EXPECT_EQ(c.store_dir, "/tmp/x");
  EXPECT_EQ(c.port, 0);
  EXPECT_EQ(c.probe_interval, 500ms);
  EXPECT_EQ(c.failure_threshold, 3);
  ASSERT_TRUE(c.remote_sectors);
  EXPECT_EQ(c.remote_sectors->port, 9000);
  for (const char* bad : {"port: 80", "store: x\nport: 70000", "store: x\nfailure_threshold: 0", "store: x\nport: abc"}) {
    try {
      serve_config_from_yaml(YAML::Load(bad));
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadConfig) << bad;
    }
  }
}

// One trained store shared by the HTTP tests.
class MeshHttp : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("af-mesh");
    store::Store st(dir_->path(), {.max_bytes = std::nullopt, .sync = false});
    const auto sc = traffic::load_scenario(testing::source_path("scenarios/fra.yaml"));
    testing::load_days(st, sc, parse_range("2024-03-01..2024-03-08"));
    testing::train_all(st, parse_range("2024-03-01..2024-03-06"));
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  static ServeConfig config() {
    ServeConfig c;
    c.store_dir = dir_->path();
    c.port = 0;
    c.probe_interval = 50ms;
    return c;
  }

  static testing::TempDir* dir_;
};

testing::TempDir* MeshHttp::dir_ = nullptr;

nlohmann::json get_json(httplib::Client& cli, const std::string& path, int expect_status) {
  auto res = cli.Get(path);
  EXPECT_TRUE(res) << path;
  if (!res) return {};
  EXPECT_EQ(res->status, expect_status) << path << " " << res->body;
  return nlohmann::json::parse(res->body);
}

TEST_F(MeshHttp, HealthAndReadiness) {
  MeshServer server(config());
  server.start();
  httplib::Client cli("127.0.0.1", server.port());
  const auto h = get_json(cli, "/v1/health", 200);
  EXPECT_EQ(h["status"], "UP");
  EXPECT_EQ(h["readiness"], true);
  EXPECT_EQ(h["services"].size(), 3u);
  EXPECT_EQ(server.registry().resolve(MeshServer::kAirportService).port, server.port());

  testing::TempDir empty;
  {
    store::Store st(empty.path());
    st.put_platform(traffic::load_scenario(testing::source_path("scenarios/fra.yaml")).platform());
  }
  ServeConfig c = config();
  c.store_dir = empty.path();
  MeshServer bare(c);
  bare.start();
  httplib::Client cli2("127.0.0.1", bare.port());
  const auto h2 = get_json(cli2, "/v1/health", 200);
  EXPECT_EQ(h2["readiness"], false);
  const auto missing = h2["missing_models"].get<std::vector<std::string>>();
  EXPECT_NE(std::find(missing.begin(), missing.end(), "FRA/rc"), missing.end());
  EXPECT_NE(std::find(missing.begin(), missing.end(), "FRA_AN/exits"), missing.end());
  const auto err = get_json(cli2, "/v1/sectors/FRA_AN/prediction?from=2024-03-07T00:00:00Z&to=2024-03-07T01:00:00Z", 404);
  EXPECT_EQ(err["error"]["code"], "NoPredictor");
}

TEST_F(MeshHttp, PredictionsMatchLibraryAfterSerialization) {
  MeshServer server(config());
  server.start();
  httplib::Client cli("127.0.0.1", server.port());
  const EpochSeconds from = parse_iso("2024-03-07T06:00:00Z");
  const EpochSeconds to = from + 8 * 900;
  const auto j = get_json(cli, "/v1/sectors/FRA_AS/prediction?target=exits&from=2024-03-07T06:00:00Z&to=2024-03-07T08:00:00Z", 200);
  const auto lib = server.sectors().predict_horizon("FRA_AS", pipeline::Target::Exits, from, to, server.weather_for(from, to));
  ASSERT_EQ(j["points"].size(), lib.size());
  for (std::size_t i = 0; i < lib.size(); ++i) {
    EXPECT_EQ(j["points"][i]["bucket"], format_iso(lib[i].first));
    EXPECT_EQ(j["points"][i]["value"].get<double>(), wire_value(lib[i].second));
  }
  const auto cap = get_json(cli, "/v1/airports/FRA/capacity?from=2024-03-07T06:00:00Z&to=2024-03-07T07:00:00Z", 200);
  ASSERT_EQ(cap["points"].size(), 4u);
  const auto weather = server.weather_for(from, from + 3600);
  for (std::size_t i = 0; i < 4; ++i) {
    const EpochSeconds t = from + static_cast<EpochSeconds>(i) * 900;
    const auto want = server.airports().predict_capacity("FRA", t, *weather.latest("EDDF", t));
    const auto& p = cap["points"][i];
    EXPECT_EQ(p["rc"], want.rc);
    EXPECT_EQ(p["arrivals"].get<double>(), wire_value(want.arrivals));
    EXPECT_EQ(p["departures"].get<double>(), wire_value(want.departures));
    EXPECT_EQ(p["degraded"], false);
  }
}

TEST_F(MeshHttp, ErrorResponses) {
  MeshServer server(config());
  server.start();
  httplib::Client cli("127.0.0.1", server.port());
  EXPECT_EQ(get_json(cli, "/v1/sectors/FRA_AN/prediction?from=2024-03-07T00:07:00Z&to=2024-03-07T01:00:00Z", 400)["error"]["code"], "BadConfig");
  EXPECT_EQ(get_json(cli, "/v1/sectors/FRA_AN/prediction?to=2024-03-07T01:00:00Z", 400)["error"]["code"], "FormatError");
  EXPECT_EQ(get_json(cli, "/v1/sectors/FRA_AN/prediction?from=yesterday&to=2024-03-07T01:00:00Z", 400)["error"]["code"], "FormatError");
  EXPECT_EQ(get_json(cli, "/v1/sectors/FRA_AN/prediction?target=speed&from=2024-03-07T00:00:00Z&to=2024-03-07T01:00:00Z", 400)["error"]["code"], "BadConfig");
  EXPECT_EQ(get_json(cli, "/v1/sectors/NOPE/prediction?from=2024-03-07T00:00:00Z&to=2024-03-07T01:00:00Z", 404)["error"]["code"], "NoPredictor");
  EXPECT_EQ(get_json(cli, "/v1/airports/MUC/capacity?from=2024-03-07T00:00:00Z&to=2024-03-07T01:00:00Z", 404)["error"]["code"], "NoTopology");
  EXPECT_EQ(get_json(cli, "/v1/sectors/FRA_AN/prediction?from=2024-05-07T00:00:00Z&to=2024-05-07T01:00:00Z", 422)["error"]["code"], "NoWeather");
  auto res = cli.Post("/v1/admin/retrain", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = cli.Post("/v1/admin/retrain", R"({"sector":"FRA_AN","range":"2024-04-01..2024-04-02"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422) << res->body;
}

TEST_F(MeshHttp, RetrainPublishesAndSwaps) {
  MeshServer server(config());
  server.start();
  httplib::Client cli("127.0.0.1", server.port());
  const auto before = server.sectors().predictor("FRA_DW", pipeline::Target::Occupancy)->version;
  auto res = cli.Post("/v1/admin/retrain", R"({"sector":"FRA_DW","range":"2024-03-01..2024-03-04"})", "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  const auto j = nlohmann::json::parse(res->body);
  const auto p = server.sectors().predictor("FRA_DW", pipeline::Target::Occupancy);
  EXPECT_EQ(p->version, before + 1);
  EXPECT_EQ(j["model_id"], p->model_id);
  EXPECT_EQ(j["cv_score"].get<double>(), wire_value(p->cv_score));
  res = cli.Post("/v1/admin/retrain", R"({"airport":"FRA","range":"2024-03-01..2024-03-04"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200) << res->body;
  EXPECT_GT(nlohmann::json::parse(res->body)["cv_score"].get<double>(), 0.9);
}

TEST_F(MeshHttp, PortInUse) {
  MeshServer a(config());
  a.start();
  ServeConfig c = config();
  c.port = a.port();
  MeshServer b(c);
  try {
    b.start();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PortInUse);
  }
}

// The airport side consumes a sector service in another server; losing it
// degrades capacity answers without errors and recovery clears the flag.
TEST_F(MeshHttp, RemoteSectorServiceOutage) {
  auto sectors = std::make_unique<MeshServer>(config());
  sectors->start();
  const int sector_port = sectors->port();
  ServeConfig c = config();
  c.remote_sectors = RemoteEndpoint{"127.0.0.1", sector_port};
  c.probe_interval = 20ms;
  MeshServer airport(c);
  airport.start();
  httplib::Client cli("127.0.0.1", airport.port());
  const std::string path = "/v1/airports/FRA/capacity?from=2024-03-07T10:00:00Z&to=2024-03-07T11:00:00Z";
  for (const auto& p : get_json(cli, path, 200)["points"]) EXPECT_EQ(p["degraded"], false);

  sectors.reset();
  for (const auto& p : get_json(cli, path, 200)["points"]) EXPECT_EQ(p["degraded"], true);
  for (int i = 0; i < 200 && airport.registry().health(MeshServer::kSectorService) != Status::Down; ++i) {
    std::this_thread::sleep_for(10ms);
  }
  EXPECT_EQ(airport.registry().health(MeshServer::kSectorService), Status::Down);
  EXPECT_EQ(airport.registry().health(MeshServer::kAirportService), Status::Degraded);
  for (const auto& p : get_json(cli, path, 200)["points"]) EXPECT_EQ(p["degraded"], true);

  ServeConfig back = config();
  back.port = sector_port;
  MeshServer restored(back);
  restored.start();
  for (int i = 0; i < 200 && airport.registry().health(MeshServer::kSectorService) != Status::Up; ++i) {
    std::this_thread::sleep_for(10ms);
  }
  EXPECT_EQ(airport.registry().health(MeshServer::kSectorService), Status::Up);
  for (const auto& p : get_json(cli, path, 200)["points"]) EXPECT_EQ(p["degraded"], false);
}

}  // namespace
}  // namespace aeroflow::mesh
