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

// aeroflow command-line driver: simulate, ingest, prepare, train, evaluate,
// plot and serve.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aeroflow/core/error.hpp"
#include "aeroflow/core/fileio.hpp"
#include "aeroflow/mesh/server.hpp"
#include "aeroflow/metar/metar.hpp"
#include "aeroflow/pipeline/prepare.hpp"
#include "aeroflow/services/airport_service.hpp"
#include "aeroflow/services/report.hpp"
#include "aeroflow/services/sector_service.hpp"
#include "aeroflow/store/event.hpp"
#include "aeroflow/store/store.hpp"
#include "aeroflow/traffic/scenario.hpp"

namespace fs = std::filesystem;
using namespace aeroflow;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::set<fs::path> sorted;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file()) sorted.insert(e.path());
      }
      files.insert(files.end(), sorted.begin(), sorted.end());
    } else {
      files.emplace_back(in);
    }
  }
  return files;
}

std::vector<store::RcRecord> read_rc_file(const fs::path& path) {
  std::vector<store::RcRecord> out;
  std::size_t n = 0;
  for (const auto& line : read_complete_lines(path)) {
    ++n;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("airport").get<std::string>(), j.at("ts").get<EpochSeconds>(), j.at("rc").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::FormatError, path.filename().string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void cmd_ingest(store::Store& st, const std::vector<std::string>& inputs) {
  for (const auto& path : expand_inputs(inputs)) {
    const auto name = path.filename().string();
    if (name == "topology.yaml" || path.extension() == ".yaml" || path.extension() == ".yml") {
      st.put_platform(services::load_platform(path.string()));
      std::cout << name << ": topology stored\n";
    } else if (starts_with(name, "rc-")) {
      const auto records = read_rc_file(path);
      st.append_rc(records);
      std::cout << name << ": " << records.size() << " runway-configuration records\n";
    } else if (path.extension() == ".jsonl") {
      auto events = store::replay(path);
      const auto count = events.size();
      const auto seqs = st.append_raw_batch(std::move(events));
      std::cout << name << ": " << count << " events, " << count - seqs.size() << " duplicates\n";
    } else if (path.extension() == ".txt") {
      const auto result = metar::parse_metar_text(read_text(path));
      std::vector<metar::WeatherObservation> resolved;
      for (const auto& obs : result.observations) {
        if (obs.obs_time) resolved.push_back(obs);
      }
      st.append_weather(resolved);
      std::cout << name << ": " << resolved.size() << " reports, " << result.rejected.size() << " rejected\n";
      for (const auto& r : result.rejected) std::cerr << "  line " << r.line << ": " << r.message << '\n';
    } else {
      throw Error(ErrorCode::FormatError, "do not know how to ingest " + path.string());
    }
  }
}

void cmd_prepare(store::Store& st, const DateRange& range) {
  for (const Date d : range.days()) {
    const auto r = pipeline::prepare_day(st, d);
    std::cout << format_date(d) << ": " << r.raw_events << " events, " << r.intervals << " intervals, "
              << r.duplicates << " duplicates, " << r.dropped_exits << " unmatched exits, " << r.ambiguous_groups
              << " ambiguous groups\n";
  }
}

void train_sector_targets(services::SectorService& svc, const std::string& sector,
                          const std::vector<pipeline::Target>& targets, const DateRange& range) {
  for (auto t : targets) {
    const auto out = svc.train_sector(sector, t, range);
    std::printf("%s %-9s %-5s cv=%.4f model=%s version=%llu\n", sector.c_str(),
                std::string(pipeline::to_string(t)).c_str(), std::string(ml::to_string(out.selection.best_kind)).c_str(),
                out.predictor.cv_score, out.predictor.model_id.c_str(),
                static_cast<unsigned long long>(out.predictor.version));
  }
}

void cmd_train_airport(store::Store& st, services::SectorService& sectors, const std::string& airport,
                       const DateRange& range) {
  const auto cfg = st.platform();
  const auto* topo = cfg.find_airport(airport);
  if (topo == nullptr) throw Error(ErrorCode::NoTopology, "no topology for airport " + airport);
  std::set<std::string> arr;
  std::set<std::string> dep;
  for (const auto& r : topo->runways) {
    arr.insert(r.arrival_sectors.begin(), r.arrival_sectors.end());
    dep.insert(r.departure_sectors.begin(), r.departure_sectors.end());
  }
  for (const auto& s : arr) train_sector_targets(sectors, s, {pipeline::Target::Exits}, range);
  for (const auto& s : dep) train_sector_targets(sectors, s, {pipeline::Target::Entries}, range);
  services::InProcessSectorSource source(sectors);
  services::AirportService svc(cfg, source, &st);
  const auto out = svc.train_rc_classifier(airport, services::rc_history(st, cfg, airport, range));
  const bool single = std::get<ml::LogisticParams>(out.model.params).single_class;
  std::printf("%s rc LOGISTIC cv_accuracy=%.4f model=%s%s\n", airport.c_str(), out.cv_accuracy,
              out.model_id.c_str(), single ? " (single class)" : "");
}

void cmd_evaluate(store::Store& st, const DateRange& range, const fs::path& out_dir, const eval::CvConfig& cv) {
  const auto cfg = st.platform();
  services::EvaluationReport report;
  report.range = range.to_string();
  for (const auto& s : cfg.sectors) {
    auto ev = services::evaluate_sector(st, s.id, range, cv);
    std::printf("%s %-5s raw=%.4f balanced=%.4f\n", s.id.c_str(), std::string(ml::to_string(ev.best_kind)).c_str(),
                ev.result.raw_score, ev.result.balanced_score);
    report.sectors.push_back(std::move(ev));
  }
  fs::create_directories(out_dir);
  services::SectorService sectors(cfg, &st);
  sectors.load_published();
  services::InProcessSectorSource source(sectors);
  services::AirportService airports(cfg, source, &st);
  airports.load_published();
  for (const auto& a : cfg.airports) {
    if (!airports.has_classifier(a.airport_id)) {
      std::cerr << a.airport_id << ": no runway-configuration classifier, skipped (run train --airport)\n";
      continue;
    }
    const auto ev = airports.evaluate_airport(a.airport_id, range);
    const auto name =
        cfg.airports.size() == 1 ? std::string("airport_timeseries.csv") : "airport_timeseries-" + a.airport_id + ".csv";
    write_atomic(out_dir / name, services::airport_timeseries_csv(ev));
    std::size_t degraded = 0;
    for (const auto& r : ev.rows) degraded += r.degraded ? 1 : 0;
    std::printf("%s arrivals=%.4f departures=%.4f rows=%zu degraded=%zu\n", a.airport_id.c_str(),
                ev.mean_arrival_score, ev.mean_departure_score, ev.rows.size(), degraded);
    report.airports.push_back({a.airport_id, ev.arrival_day_scores, ev.departure_day_scores});
  }
  write_atomic(out_dir / "evaluation.json", services::to_json(report).dump(2) + "\n");
  std::cout << "wrote " << (out_dir / "evaluation.json").string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aeroflow: sector traffic and airport capacity prediction"};
  app.require_subcommand(1);
  std::string store_dir = "af_store";
  app.add_option("--store", store_dir, "Store directory (AF_STORE_DIR takes precedence)");

  auto* sim = app.add_subcommand("simulate", "Generate synthetic events, METAR and runway logs");
  std::string scenario_file;
  std::string sim_from;
  std::string sim_to;
  std::optional<std::uint64_t> sim_seed;
  std::string sim_out;
  sim->add_option("--scenario", scenario_file, "Scenario YAML")->required()->check(CLI::ExistingFile);
  sim->add_option("--from", sim_from, "First day (YYYY-MM-DD)")->required();
  sim->add_option("--to", sim_to, "Last day, inclusive")->required();
  sim->add_option("--seed", sim_seed, "Overrides the scenario seed");
  sim->add_option("--out", sim_out, "Output directory")->required();

  auto* ingest = app.add_subcommand("ingest", "Append event, METAR, runway-log and topology files to the store");
  std::vector<std::string> ingest_in;
  ingest->add_option("--in", ingest_in, "Files or directories")->required();

  auto* prepare = app.add_subcommand("prepare", "Bucket raw days into the prepared store");
  std::string prep_date;
  std::string prep_range;
  auto* date_opt = prepare->add_option("--date", prep_date, "Single day");
  auto* range_opt = prepare->add_option("--range", prep_range, "Inclusive range a..b");
  date_opt->excludes(range_opt);
  prepare->require_option(1);

  auto* train = app.add_subcommand("train", "Select and publish models");
  std::string train_sector;
  std::string train_airport;
  std::string train_range;
  std::string train_target = "occupancy";
  bool train_all = false;
  auto* ts_opt = train->add_option("--sector", train_sector, "Sector id");
  auto* ta_opt = train->add_option("--airport", train_airport, "Airport id (runway classifier and its sector flows)");
  auto* tall_opt = train->add_flag("--all", train_all, "Every sector (occupancy) and every airport");
  ts_opt->excludes(ta_opt)->excludes(tall_opt);
  ta_opt->excludes(tall_opt);
  train->add_option("--target", train_target, "occupancy|entries|exits|all (sector only)");
  train->add_option("--range", train_range, "Inclusive range a..b")->required();
  std::uint64_t train_seed = 0;
  int train_k = 5;
  train->add_option("--seed", train_seed, "Cross-validation seed");
  train->add_option("--folds", train_k, "Cross-validation folds");

  auto* evaluate = app.add_subcommand("evaluate", "Score sectors and airports over a range");
  std::string eval_range;
  std::string eval_out;
  std::uint64_t eval_seed = 0;
  int eval_k = 5;
  evaluate->add_option("--range", eval_range, "Inclusive range a..b")->required();
  evaluate->add_option("--out", eval_out, "Output directory")->required();
  evaluate->add_option("--seed", eval_seed, "Cross-validation seed");
  evaluate->add_option("--folds", eval_k, "Cross-validation folds");

  auto* plot = app.add_subcommand("plot", "Emit scatter and histogram CSVs from an evaluation");
  std::string plot_out;
  std::string plot_from;
  int plot_bins = 10;
  plot->add_option("--out", plot_out, "Output directory")->required();
  plot->add_option("--from", plot_from, "Directory holding evaluation.json (default: --out)");
  plot->add_option("--bins", plot_bins, "Histogram bins");

  auto* serve = app.add_subcommand("serve", "Run the HTTP endpoints");
  std::string serve_config;
  std::optional<int> serve_port;
  serve->add_option("--config", serve_config, "Serve config YAML")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", serve_port, "Overrides the configured port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      auto scenario = traffic::load_scenario(scenario_file);
      if (sim_seed) scenario.seed = *sim_seed;
      const DateRange range{parse_date(sim_from), parse_date(sim_to)};
      if (range.last < range.first) throw Error(ErrorCode::EmptyRange, sim_from + ".." + sim_to);
      traffic::simulate(scenario, range, sim_out);
      std::cout << "simulated " << range.size() << " days into " << sim_out << '\n';
      return 0;
    }
    if (serve->parsed()) {
      auto cfg = mesh::load_serve_config(serve_config);
      if (serve_port) cfg.port = *serve_port;
      if (const char* env = std::getenv("AF_STORE_DIR"); env != nullptr && *env != '\0') cfg.store_dir = env;
      mesh::MeshServer server(cfg);
      server.start();
      const auto missing = server.missing_models();
      std::cout << "listening on " << cfg.host << ':' << server.port() << '\n';
      if (!missing.empty()) std::cout << "not ready: " << missing.size() << " models missing\n";
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
      server.stop();
      return 0;
    }
    if (plot->parsed()) {
      const fs::path from = plot_from.empty() ? fs::path(plot_out) : fs::path(plot_from);
      const auto report = services::report_from_json(nlohmann::json::parse(read_text(from / "evaluation.json")));
      for (const auto& p : services::write_plot_files(report, plot_out, plot_bins)) std::cout << p.string() << '\n';
      return 0;
    }

    store::Store st(store::Store::resolve_root(store_dir));
    if (ingest->parsed()) {
      cmd_ingest(st, ingest_in);
    } else if (prepare->parsed()) {
      cmd_prepare(st, prep_date.empty() ? parse_range(prep_range) : parse_range(prep_date));
    } else if (train->parsed()) {
      const auto range = parse_range(train_range);
      services::SectorService svc(st.platform(), &st, {train_k, train_seed}, eval::default_candidates(train_seed));
      if (!train_sector.empty()) {
        std::vector<pipeline::Target> targets;
        if (train_target == "all") {
          targets = {pipeline::Target::Occupancy, pipeline::Target::Entries, pipeline::Target::Exits};
        } else {
          targets = {pipeline::parse_target(train_target)};
        }
        train_sector_targets(svc, train_sector, targets, range);
      } else if (!train_airport.empty()) {
        cmd_train_airport(st, svc, train_airport, range);
      } else if (train_all) {
        const auto cfg = st.platform();
        for (const auto& s : cfg.sectors) train_sector_targets(svc, s.id, {pipeline::Target::Occupancy}, range);
        for (const auto& a : cfg.airports) cmd_train_airport(st, svc, a.airport_id, range);
      } else {
        throw Error(ErrorCode::BadConfig, "train needs --sector, --airport or --all");
      }
    } else if (evaluate->parsed()) {
      cmd_evaluate(st, parse_range(eval_range), eval_out, {eval_k, eval_seed});
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
