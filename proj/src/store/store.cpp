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

#include "aeroflow/store/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "aeroflow/core/error.hpp"
#include "aeroflow/core/fileio.hpp"

namespace aeroflow::store {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

int day_key(Date d) {
  return static_cast<int>(d.year()) * 10000 + static_cast<int>(static_cast<unsigned>(d.month())) * 100 +
         static_cast<int>(static_cast<unsigned>(d.day()));
}

std::optional<Date> date_from_name(const std::string& name, const std::string& prefix, const std::string& ext) {
  if (name.size() != prefix.size() + 8 + ext.size()) return std::nullopt;
  if (name.compare(0, prefix.size(), prefix) != 0 || name.compare(name.size() - ext.size(), ext.size(), ext) != 0) {
    return std::nullopt;
  }
  try {
    return parse_date(std::string_view(name).substr(prefix.size(), 8));
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Last newline-terminated line of a file, read from the tail only.
std::optional<std::string> last_complete_line(const fs::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) return std::nullopt;
  const auto size = static_cast<std::int64_t>(in.tellg());
  std::int64_t window = 4096;
  while (true) {
    const std::int64_t start = std::max<std::int64_t>(0, size - window);
    std::string buf(static_cast<std::size_t>(size - start), '\0');
    in.seekg(start);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    auto end = buf.rfind('\n');
    if (end == std::string::npos) {
      if (start == 0) return std::nullopt;
      window *= 2;
      continue;
    }
    // Skip blank terminators so a trailing empty line does not hide the record.
    while (end != std::string::npos) {
      auto begin = end == 0 ? std::string::npos : buf.rfind('\n', end - 1);
      if (begin == std::string::npos && start > 0) break;  // line starts before the window
      const std::size_t from = begin == std::string::npos ? 0 : begin + 1;
      if (end > from) return buf.substr(from, end - from);
      if (begin == std::string::npos) return std::nullopt;
      end = begin;
    }
    if (start == 0) return std::nullopt;
    window *= 2;
  }
}

ordered_json weather_to_json(const metar::WeatherObservation& o) {
  ordered_json j;
  j["station"] = o.station;
  j["ts"] = *o.obs_time;
  j["raw"] = o.raw.empty() ? metar::emit_canonical(o) : o.raw;
  j["temp_c"] = o.temp_c;
  j["dewpoint_c"] = o.dewpoint_c;
  j["wind_dir_deg"] = o.wind_dir_deg;
  j["wind_variable"] = o.wind_variable;
  j["wind_speed_kt"] = o.wind_speed_kt;
  j["visibility_m"] = o.visibility_m;
  j["pressure_hpa"] = o.pressure_hpa;
  j["humidity_pct"] = o.humidity_pct;
  return j;
}

}  // namespace

Store::Store(fs::path root, StoreOptions options) : root_(std::move(root)), options_(options) {
  fs::create_directories(root_ / "raw");
  fs::create_directories(root_ / "config");
  fs::create_directories(root_ / "prepared");
  fs::create_directories(root_ / "ml");
  for (const auto& entry : fs::directory_iterator(root_ / "raw")) {
    if (!entry.is_regular_file()) continue;
    raw_bytes_ += entry.file_size();
    const auto name = entry.path().filename().string();
    if (!date_from_name(name, "events-", ".jsonl")) continue;
    if (auto line = last_complete_line(entry.path())) {
      try {
        next_seq_ = std::max(next_seq_, decode_event(*line).source_seq + 1);
      } catch (const Error&) {
        // A damaged tail record is skipped by readers as well.
      }
    }
  }
}

fs::path Store::resolve_root(const fs::path& fallback) {
  if (const char* env = std::getenv("AF_STORE_DIR"); env != nullptr && *env != '\0') return env;
  return fallback;
}

fs::path Store::raw_path(const std::string& prefix, Date d, const char* ext) const {
  return root_ / "raw" / (prefix + "-" + format_yyyymmdd(d) + ext);
}

// Truncates a torn final record so the next append starts on a line boundary.
void Store::recover_tail(const fs::path& path) const {
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec || size == 0) return;
  std::ifstream in(path, std::ios::binary);
  std::uintmax_t pos = size;
  char c = 0;
  in.seekg(static_cast<std::streamoff>(size - 1));
  in.get(c);
  if (c == '\n') return;
  while (pos > 0) {
    in.seekg(static_cast<std::streamoff>(pos - 1));
    in.get(c);
    if (c == '\n') break;
    --pos;
  }
  in.close();
  fs::resize_file(path, pos);
}

void Store::append_lines(const fs::path& path, const std::string& text) {
  if (options_.max_bytes && raw_bytes_ + text.size() > *options_.max_bytes) {
    throw Error(ErrorCode::StorageFull, "raw store limit of " + std::to_string(*options_.max_bytes) + " bytes reached");
  }
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::StorageFull, "cannot open " + path.string() + ": " + std::strerror(errno));
  std::size_t done = 0;
  while (done < text.size()) {
    auto n = ::write(fd, text.data() + done, text.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      throw Error(ErrorCode::StorageFull, "append to " + path.string() + ": " + std::strerror(err));
    }
    done += static_cast<std::size_t>(n);
  }
  if (options_.sync) ::fdatasync(fd);
  ::close(fd);
  raw_bytes_ += text.size();
}

Store::Segment& Store::segment(Date d) {
  auto& seg = segments_[day_key(d)];
  if (!seg.recovered) {
    const auto path = raw_path("events", d);
    if (fs::exists(path)) {
      recover_tail(path);
      for (const auto& e : read_day(d)) seg.keys.emplace(e.flight_id, static_cast<int>(e.kind), e.resource_id, e.timestamp);
    }
    seg.recovered = true;
  }
  return seg;
}

std::uint64_t Store::append_raw(FlightEvent event) {
  std::vector<FlightEvent> one;
  one.push_back(std::move(event));
  return append_raw_batch(std::move(one)).front();
}

std::vector<std::uint64_t> Store::append_raw_batch(std::vector<FlightEvent> events) {
  for (const auto& e : events) validate_event(e);
  std::map<int, std::pair<Date, std::string>> text;
  std::map<int, std::string> dups;
  std::vector<std::uint64_t> seqs;
  seqs.reserve(events.size());
  std::uint64_t seq = next_seq_;
  std::map<int, std::set<std::tuple<std::string, int, std::string, EpochSeconds>>> new_keys;
  for (auto& e : events) {
    const Date d = date_of(e.timestamp);
    const int key = day_key(d);
    auto& seg = segment(d);
    e.source_seq = seq++;
    auto k = std::make_tuple(e.flight_id, static_cast<int>(e.kind), e.resource_id, e.timestamp);
    auto& pending = new_keys[key];
    if (seg.keys.contains(k) || !pending.insert(std::move(k)).second) {
      dups[key] += std::to_string(e.source_seq) + '\n';
    }
    auto& slot = text[key];
    slot.first = d;
    slot.second += encode_event(e);
    slot.second += '\n';
    seqs.push_back(e.source_seq);
  }
  std::uintmax_t total = 0;
  for (const auto& [key, t] : text) total += t.second.size();
  if (options_.max_bytes && raw_bytes_ + total > *options_.max_bytes) {
    throw Error(ErrorCode::StorageFull, "raw store limit of " + std::to_string(*options_.max_bytes) + " bytes reached");
  }
  for (const auto& [key, t] : text) {
    append_lines(raw_path("events", t.first), t.second);
    if (auto it = dups.find(key); it != dups.end()) append_lines(raw_path("events", t.first, ".dups"), it->second);
    auto& seg = segments_[key];
    seg.keys.merge(new_keys[key]);
  }
  next_seq_ = seq;
  return seqs;
}

std::vector<FlightEvent> Store::read_day(Date d) const {
  const auto path = raw_path("events", d);
  if (!fs::exists(path)) throw Error(ErrorCode::NotFound, "no raw events for " + format_date(d));
  std::vector<FlightEvent> events;
  for (const auto& line : read_complete_lines(path)) {
    if (line.empty()) continue;
    events.push_back(decode_event(line));
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const FlightEvent& a, const FlightEvent& b) { return a.source_seq < b.source_seq; });
  return events;
}

void Store::ensure_day(Date d) {
  const auto path = raw_path("events", d);
  if (!fs::exists(path)) std::ofstream(path, std::ios::binary | std::ios::app).flush();
}

bool Store::has_raw_day(Date d) const { return fs::exists(raw_path("events", d)); }

std::vector<Date> Store::raw_days() const {
  std::vector<Date> days;
  for (const auto& entry : fs::directory_iterator(root_ / "raw")) {
    if (auto d = date_from_name(entry.path().filename().string(), "events-", ".jsonl")) days.push_back(*d);
  }
  std::sort(days.begin(), days.end());
  return days;
}

std::set<std::uint64_t> Store::duplicate_seqs(Date d) const {
  std::set<std::uint64_t> out;
  const auto path = raw_path("events", d, ".dups");
  if (!fs::exists(path)) return out;
  for (const auto& line : read_complete_lines(path)) {
    if (!line.empty()) out.insert(std::stoull(line));
  }
  return out;
}

std::uint64_t Store::next_seq() const { return next_seq_; }

void Store::append_weather(const std::vector<metar::WeatherObservation>& observations) {
  std::map<int, std::pair<Date, std::string>> text;
  for (const auto& o : observations) {
    if (!o.obs_time) throw Error(ErrorCode::ValidationError, "weather observation without a resolved time");
    const Date d = date_of(*o.obs_time);
    auto& slot = text[day_key(d)];
    slot.first = d;
    slot.second += weather_to_json(o).dump();
    slot.second += '\n';
  }
  for (const auto& [key, t] : text) {
    const auto path = raw_path("weather", t.first);
    recover_tail(path);
    append_lines(path, t.second);
  }
}

std::vector<metar::WeatherObservation> Store::read_weather(Date d) const {
  std::vector<metar::WeatherObservation> out;
  const auto path = raw_path("weather", d);
  if (!fs::exists(path)) return out;
  for (const auto& line : read_complete_lines(path)) {
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      auto obs = metar::parse_metar(j.at("raw").get<std::string>());
      obs.obs_time = j.at("ts").get<EpochSeconds>();
      out.push_back(std::move(obs));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::FormatError, path.filename().string() + ": " + e.what());
    }
  }
  return out;
}

void Store::append_rc(const std::vector<RcRecord>& records) {
  std::map<int, std::pair<Date, std::string>> text;
  for (const auto& r : records) {
    const Date d = date_of(r.ts);
    ordered_json j;
    j["airport"] = r.airport;
    j["ts"] = r.ts;
    j["rc"] = r.rc;
    auto& slot = text[day_key(d)];
    slot.first = d;
    slot.second += j.dump();
    slot.second += '\n';
  }
  for (const auto& [key, t] : text) {
    const auto path = raw_path("rc", t.first);
    recover_tail(path);
    append_lines(path, t.second);
  }
}

std::vector<RcRecord> Store::read_rc(Date d) const {
  std::vector<RcRecord> out;
  const auto path = raw_path("rc", d);
  if (!fs::exists(path)) return out;
  for (const auto& line : read_complete_lines(path)) {
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      out.push_back({j.at("airport").get<std::string>(), j.at("ts").get<EpochSeconds>(), j.at("rc").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error(ErrorCode::FormatError, path.filename().string() + ": " + e.what());
    }
  }
  return out;
}

void Store::put_platform(const services::PlatformConfig& cfg) {
  cfg.validate();
  services::save_platform(cfg, (root_ / "config" / "topology.yaml").string());
}

services::PlatformConfig Store::platform() const {
  const auto path = root_ / "config" / "topology.yaml";
  if (!fs::exists(path)) throw Error(ErrorCode::NotFound, "no topology in store " + root_.string());
  return services::load_platform(path.string());
}

bool Store::has_platform() const { return fs::exists(root_ / "config" / "topology.yaml"); }

fs::path Store::prepared_dir(Date d) const { return prepared_root() / format_yyyymmdd(d); }

bool Store::is_prepared(Date d) const { return fs::exists(prepared_dir(d) / "ST.json"); }

namespace {

std::vector<std::pair<int, fs::path>> generations(const fs::path& root, const std::string& day) {
  std::vector<std::pair<int, fs::path>> out;
  const std::string prefix = day + ".g";
  for (const auto& entry : fs::directory_iterator(root)) {
    const auto name = entry.path().filename().string();
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) continue;
    try {
      out.emplace_back(std::stoi(name.substr(prefix.size())), entry.path());
    } catch (const std::exception&) {
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

fs::path Store::stage_prepared(Date d) const {
  const auto day = format_yyyymmdd(d);
  const auto gens = generations(prepared_root(), day);
  const int next = gens.empty() ? 1 : gens.back().first + 1;
  auto dir = prepared_root() / (day + ".g" + std::to_string(next));
  fs::create_directories(dir);
  return dir;
}

void Store::commit_prepared(Date d, const fs::path& generation) const {
  const auto day = format_yyyymmdd(d);
  const auto link = prepared_dir(d);
  std::optional<fs::path> previous;
  std::error_code ec;
  if (fs::is_symlink(link, ec)) previous = prepared_root() / fs::read_symlink(link);
  const auto tmp = prepared_root() / (day + ".link-tmp");
  fs::remove(tmp, ec);
  fs::create_directory_symlink(generation.filename(), tmp);
  fs::rename(tmp, link);
  // Keep the generation just replaced for readers that resolved it already.
  for (const auto& [n, path] : generations(prepared_root(), day)) {
    if (path.filename() == generation.filename()) continue;
    if (previous && path.filename() == previous->filename()) continue;
    fs::remove_all(path, ec);
  }
}

std::string Store::publish_model(const ml::TrainedModel& model) { return publish_artifact(ml::serialize(model)); }

std::string Store::publish_artifact(const std::string& json_text) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("artifact is not JSON: ") + e.what());
  }
  const ml::TrainedModel model = ml::from_json(parsed);
  std::lock_guard lock(ml_mutex_);
  auto index = model_index();
  char buf[16];
  std::snprintf(buf, sizeof buf, "m%06zu", index.size() + 1);
  const std::string id = buf;
  write_atomic(root_ / "ml" / (id + ".json"), json_text);
  index.push_back({id, model.sector_id.empty() ? model.airport_id : model.sector_id, model.target,
                   std::string(ml::to_string(model.kind))});
  write_index_locked(index);
  return id;
}

void Store::write_index_locked(const std::vector<ModelIndexEntry>& index) const {
  ordered_json arr = ordered_json::array();
  for (const auto& e : index) {
    arr.push_back({{"id", e.id}, {"scope", e.scope}, {"target", e.target}, {"kind", e.kind}});
  }
  write_atomic(root_ / "ml" / "index.json", arr.dump(1) + "\n");
}

std::string Store::load_artifact_text(const std::string& id) const {
  const auto path = root_ / "ml" / (id + ".json");
  if (id.empty() || id.find('/') != std::string::npos || !fs::exists(path)) {
    throw Error(ErrorCode::NotFound, "no model '" + id + "'");
  }
  return read_text(path);
}

ml::TrainedModel Store::load_model(const std::string& id) const {
  const auto text = load_artifact_text(id);
  try {
    return ml::from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("artifact is not JSON: ") + e.what());
  }
}

std::vector<ModelIndexEntry> Store::model_index() const {
  std::vector<ModelIndexEntry> out;
  const auto path = root_ / "ml" / "index.json";
  if (!fs::exists(path)) return out;
  for (const auto& e : json::parse(read_text(path))) {
    out.push_back({e.at("id").get<std::string>(), e.at("scope").get<std::string>(), e.at("target").get<std::string>(),
                   e.at("kind").get<std::string>()});
  }
  return out;
}

std::optional<std::string> Store::latest_model(const std::string& scope, const std::string& target) const {
  const auto index = model_index();
  for (auto it = index.rbegin(); it != index.rend(); ++it) {
    if (it->scope == scope && it->target == target) return it->id;
  }
  return std::nullopt;
}

}  // namespace aeroflow::store
