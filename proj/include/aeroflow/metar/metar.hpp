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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aeroflow/core/error.hpp"
#include "aeroflow/core/time.hpp"

namespace aeroflow::metar {

enum class SpeedUnit { Knots, MetersPerSecond };
enum class PressureUnit { Hectopascal, InchesHg };

/// One decoded routine report. Only the groups that feed the weather
/// features are retained; cloud, present-weather, RVR and remark groups are
/// accepted and dropped.
struct WeatherObservation {
  std::string station;
  int day = 1;  // day of month as reported
  int hour = 0;
  int minute = 0;
  /// Full UTC time, filled in once year/month come from the ingestion context.
  std::optional<EpochSeconds> obs_time;

  int wind_dir_deg = 0;  // [0, 360); 0 when calm or variable
  bool wind_variable = false;
  double wind_speed_kt = 0.0;
  std::optional<double> wind_gust_kt;
  SpeedUnit speed_unit = SpeedUnit::Knots;
  int reported_speed = 0;  // speed in the reported unit
  std::optional<int> reported_gust;

  int visibility_m = 10000;
  int temp_c = 0;
  int dewpoint_c = 0;
  double pressure_hpa = 1013.0;
  PressureUnit pressure_unit = PressureUnit::Hectopascal;
  int reported_pressure = 1013;  // hPa, or hundredths of inHg

  double humidity_pct = 100.0;
  std::string raw;

  /// Field equality over decoded content; `raw` is deliberately excluded
  /// because the canonical text differs from the original.
  bool same_fields(const WeatherObservation& other) const;
};

/// Parse failure carrying the offending token and its byte offset in the input.
class MetarError : public Error {
 public:
  MetarError(ErrorCode code, std::string token, std::size_t offset, const std::string& why);

  const std::string& token() const noexcept { return token_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string token_;
  std::size_t offset_;
};

/// Decodes a single-line METAR body. An optional leading "METAR" keyword and a
/// trailing '=' are tolerated; everything after the pressure group is ignored.
WeatherObservation parse_metar(std::string_view raw);

/// Magnus formula, Alduchov-Eskridge constants. Throws Error{OutOfRange}
/// outside [-60, 60] degC or when dewpoint exceeds temperature by more than 0.5.
double relative_humidity(double temp_c, double dewpoint_c);

/// Canonical body: station, time, wind, visibility, temperature, pressure.
std::string emit_canonical(const WeatherObservation& obs);

/// Resolves day/hour/minute to a UTC timestamp within (year, month).
EpochSeconds resolve_time(const WeatherObservation& obs, int year, unsigned month);

/// "#CONTEXT year=YYYY month=MM station_default=XXXX"
struct FileContext {
  int year = 1970;
  unsigned month = 1;
  std::string station_default;
};

std::optional<FileContext> parse_context_line(std::string_view line);
std::string format_context_line(const FileContext& ctx);

struct MetarFileResult {
  std::vector<WeatherObservation> observations;
  struct Rejected {
    std::size_t line;
    std::string message;
  };
  std::vector<Rejected> rejected;
};

/// Reads a report-per-line text file. Lines that fail to parse are collected,
/// not thrown. A #CONTEXT header supplies year/month for time resolution.
MetarFileResult parse_metar_text(std::string_view text, std::optional<FileContext> fallback = std::nullopt);

}  // namespace aeroflow::metar
