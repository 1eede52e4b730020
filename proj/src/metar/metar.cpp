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

#include "aeroflow/metar/metar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace aeroflow::metar {

namespace {

constexpr double kMagnusA = 17.625;
constexpr double kMagnusB = 243.04;
constexpr double kKnotsPerMps = 1.943844;
constexpr double kKnotsPerKmh = 1.0 / 1.852;
constexpr double kHpaPerInHg = 33.8639;
constexpr double kMetersPerStatuteMile = 1609.344;
constexpr int kMaxVisibility = 10000;

struct Token {
  std::string_view text;
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view raw) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; };
  while (i < raw.size()) {
    while (i < raw.size() && is_space(raw[i])) ++i;
    std::size_t start = i;
    while (i < raw.size() && !is_space(raw[i])) ++i;
    if (i > start) out.push_back({raw.substr(start, i - start), start});
  }
  if (!out.empty()) {
    auto& last = out.back().text;
    while (!last.empty() && last.back() == '=') last.remove_suffix(1);
    if (last.empty()) out.pop_back();
  }
  return out;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return is_digit(c); });
}

int digits_value(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

[[noreturn]] void fail(ErrorCode code, const Token& tok, const std::string& why) {
  throw MetarError(code, std::string(tok.text), tok.offset, why);
}

bool is_station(std::string_view s) {
  if (s.size() != 4 || !is_upper(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) { return is_upper(c) || is_digit(c); });
}

bool is_time_group(std::string_view s) { return s.size() == 7 && s.back() == 'Z' && all_digits(s.substr(0, 6)); }

struct WindGroup {
  bool variable = false;
  int dir = 0;
  int speed = 0;
  std::optional<int> gust;
  SpeedUnit unit = SpeedUnit::Knots;
  bool kmh = false;
};

std::optional<WindGroup> match_wind(std::string_view s) {
  WindGroup w;
  std::string_view unit;
  for (std::string_view u : {std::string_view("KT"), std::string_view("MPS"), std::string_view("KMH")}) {
    if (s.size() > u.size() && s.substr(s.size() - u.size()) == u) {
      unit = u;
      break;
    }
  }
  if (unit.empty()) return std::nullopt;
  std::string_view body = s.substr(0, s.size() - unit.size());
  if (body.size() < 5) return std::nullopt;
  std::string_view dir = body.substr(0, 3);
  if (dir == "VRB") {
    w.variable = true;
  } else if (all_digits(dir)) {
    w.dir = digits_value(dir);
  } else {
    return std::nullopt;
  }
  body.remove_prefix(3);
  std::size_t g = body.find('G');
  std::string_view speed = body.substr(0, g);
  if (speed.size() < 2 || speed.size() > 3 || !all_digits(speed)) return std::nullopt;
  w.speed = digits_value(speed);
  if (g != std::string_view::npos) {
    std::string_view gust = body.substr(g + 1);
    if (gust.size() < 2 || gust.size() > 3 || !all_digits(gust)) return std::nullopt;
    w.gust = digits_value(gust);
  }
  if (unit == "MPS") w.unit = SpeedUnit::MetersPerSecond;
  if (unit == "KMH") w.kmh = true;
  return w;
}

bool is_missing_wind(std::string_view s) { return s.size() >= 5 && s.substr(0, 5) == "/////"; }

bool is_wind_variation(std::string_view s) {
  return s.size() == 7 && s[3] == 'V' && all_digits(s.substr(0, 3)) && all_digits(s.substr(4, 3));
}

// Visibility in meters (already clamped), or nullopt when the token is not a
// visibility group. `consumed` reports how many tokens were used (US whole +
// fraction forms span two tokens).
std::optional<int> match_visibility(const std::vector<Token>& toks, std::size_t i, std::size_t& consumed) {
  std::string_view s = toks[i].text;
  consumed = 1;
  if (s == "CAVOK") return kMaxVisibility;
  if (s.size() == 4 && all_digits(s)) {
    int v = digits_value(s);
    return v >= 9999 ? kMaxVisibility : v;
  }
  if (s.size() == 7 && all_digits(s.substr(0, 4)) && s.substr(4) == "NDV") {
    int v = digits_value(s.substr(0, 4));
    return v >= 9999 ? kMaxVisibility : v;
  }
  auto statute = [](std::string_view t) -> std::optional<double> {
    if (t.size() < 3 || t.substr(t.size() - 2) != "SM") return std::nullopt;
    t.remove_suffix(2);
    if (!t.empty() && (t[0] == 'P' || t[0] == 'M')) t.remove_prefix(1);
    auto slash = t.find('/');
    if (slash == std::string_view::npos) {
      if (!all_digits(t) || t.size() > 2) return std::nullopt;
      return static_cast<double>(digits_value(t));
    }
    std::string_view num = t.substr(0, slash);
    std::string_view den = t.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den) || num.size() > 2 || den.size() > 2) return std::nullopt;
    int d = digits_value(den);
    if (d == 0) return std::nullopt;
    return static_cast<double>(digits_value(num)) / d;
  };
  auto to_meters = [](double miles) {
    long m = std::lround(miles * kMetersPerStatuteMile);
    return static_cast<int>(std::min<long>(m, kMaxVisibility));
  };
  if (auto miles = statute(s)) return to_meters(*miles);
  if (all_digits(s) && s.size() <= 2 && i + 1 < toks.size()) {
    std::string_view next = toks[i + 1].text;
    if (next.find('/') != std::string_view::npos) {
      if (auto frac = statute(next); frac && *frac < 1.0) {
        consumed = 2;
        return to_meters(digits_value(s) + *frac);
      }
    }
  }
  return std::nullopt;
}

bool is_directional_min_visibility(std::string_view s) {
  if (s.size() < 5 || s.size() > 6 || !all_digits(s.substr(0, 4))) return false;
  std::string_view dir = s.substr(4);
  static constexpr std::array<std::string_view, 8> kDirs{"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
  return std::find(kDirs.begin(), kDirs.end(), dir) != kDirs.end();
}

bool is_rvr(std::string_view s) { return s.size() >= 6 && s[0] == 'R' && is_digit(s[1]) && s.find('/') != std::string_view::npos; }

bool is_present_weather(std::string_view s) {
  if (s == "NSW") return true;
  std::string_view t = s;
  if (!t.empty() && (t[0] == '+' || t[0] == '-')) t.remove_prefix(1);
  if (t.substr(0, 2) == "VC") t.remove_prefix(2);
  static constexpr std::array<std::string_view, 8> kDesc{"MI", "PR", "BC", "DR", "BL", "SH", "TS", "FZ"};
  static constexpr std::array<std::string_view, 22> kPhen{"DZ", "RA", "SN", "SG", "IC", "PL", "GR", "GS",
                                                          "UP", "BR", "FG", "FU", "VA", "DU", "SA", "HZ",
                                                          "PY", "PO", "SQ", "FC", "SS", "DS"};
  bool any = false;
  if (t.size() >= 2 && std::find(kDesc.begin(), kDesc.end(), t.substr(0, 2)) != kDesc.end()) {
    t.remove_prefix(2);
    any = true;
  }
  while (t.size() >= 2 && std::find(kPhen.begin(), kPhen.end(), t.substr(0, 2)) != kPhen.end()) {
    t.remove_prefix(2);
    any = true;
  }
  return any && t.empty();
}

bool is_cloud(std::string_view s) {
  if (s == "SKC" || s == "CLR" || s == "NSC" || s == "NCD") return true;
  if (s.size() >= 5 && s.substr(0, 2) == "VV") {
    std::string_view h = s.substr(2, 3);
    return all_digits(h) || h == "///";
  }
  if (s.size() < 6) return false;
  std::string_view cover = s.substr(0, 3);
  if (cover != "FEW" && cover != "SCT" && cover != "BKN" && cover != "OVC" && cover != "///") return false;
  std::string_view height = s.substr(3, 3);
  if (!all_digits(height) && height != "///") return false;
  std::string_view type = s.substr(6);
  return type.empty() || type == "CB" || type == "TCU" || type == "///";
}

bool is_slashes(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c == '/'; });
}

bool is_temp_value(std::string_view s) {
  if (!s.empty() && s[0] == 'M') s.remove_prefix(1);
  return s.size() == 2 && all_digits(s);
}

int temp_value(std::string_view s) {
  bool neg = !s.empty() && s[0] == 'M';
  if (neg) s.remove_prefix(1);
  int v = digits_value(s);
  return neg ? -v : v;
}

// A temperature group "TT/DD". Returns true for any slash-separated token with a
// temperature-like left side so that a missing dewpoint is reported as such.
bool looks_like_temp_group(std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos || s.find('/', slash + 1) != std::string_view::npos) return false;
  std::string_view t = s.substr(0, slash);
  return is_temp_value(t) || t == "//";
}

bool is_pressure(std::string_view s) {
  return s.size() == 5 && (s[0] == 'Q' || s[0] == 'A') && all_digits(s.substr(1));
}

bool is_section_end(std::string_view s) {
  return s == "RMK" || s == "NOSIG" || s == "BECMG" || s == "TEMPO";
}

std::string pad(int v, int width) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%0*d", width, v);
  return buf;
}

double speed_in_knots(int reported, SpeedUnit unit, bool kmh) {
  if (kmh) return reported * kKnotsPerKmh;
  return unit == SpeedUnit::MetersPerSecond ? reported * kKnotsPerMps : static_cast<double>(reported);
}

}  // namespace

MetarError::MetarError(ErrorCode code, std::string token, std::size_t offset, const std::string& why)
    : Error(code, why + " (token '" + token + "' at byte " + std::to_string(offset) + ")"),
      token_(std::move(token)),
      offset_(offset) {}

bool WeatherObservation::same_fields(const WeatherObservation& o) const {
  return station == o.station && day == o.day && hour == o.hour && minute == o.minute &&
         wind_dir_deg == o.wind_dir_deg && wind_variable == o.wind_variable && wind_speed_kt == o.wind_speed_kt &&
         wind_gust_kt == o.wind_gust_kt && speed_unit == o.speed_unit && reported_speed == o.reported_speed &&
         reported_gust == o.reported_gust && visibility_m == o.visibility_m && temp_c == o.temp_c &&
         dewpoint_c == o.dewpoint_c && pressure_hpa == o.pressure_hpa && pressure_unit == o.pressure_unit &&
         reported_pressure == o.reported_pressure && humidity_pct == o.humidity_pct;
}

double relative_humidity(double temp_c, double dewpoint_c) {
  if (!(temp_c >= -60.0 && temp_c <= 60.0) || !(dewpoint_c >= -60.0 && dewpoint_c <= 60.0)) {
    throw Error(ErrorCode::OutOfRange, "temperature/dewpoint outside [-60, 60] degC");
  }
  if (dewpoint_c > temp_c + 0.5) throw Error(ErrorCode::OutOfRange, "dewpoint exceeds temperature");
  if (dewpoint_c == temp_c) return 100.0;
  double rh = 100.0 * std::exp(kMagnusA * dewpoint_c / (kMagnusB + dewpoint_c)) /
              std::exp(kMagnusA * temp_c / (kMagnusB + temp_c));
  return std::clamp(rh, std::nextafter(0.0, 1.0), 100.0);
}

WeatherObservation parse_metar(std::string_view raw) {
  const auto toks = tokenize(raw);
  WeatherObservation obs;
  obs.raw = std::string(raw);
  const Token end_tok{"", raw.size()};
  std::size_t i = 0;
  auto cur = [&]() -> const Token& { return i < toks.size() ? toks[i] : end_tok; };

  if (i < toks.size() && toks[i].text == "METAR") ++i;
  if (i >= toks.size()) fail(ErrorCode::MissingGroup, end_tok, "empty report");
  if (!is_station(cur().text)) fail(ErrorCode::MalformedReport, cur(), "expected 4-letter station identifier");
  obs.station = std::string(cur().text);
  ++i;

  if (i >= toks.size()) fail(ErrorCode::MissingGroup, end_tok, "missing observation time");
  if (!is_time_group(cur().text)) fail(ErrorCode::MalformedReport, cur(), "expected DDHHMMZ time group");
  {
    std::string_view t = cur().text;
    obs.day = digits_value(t.substr(0, 2));
    obs.hour = digits_value(t.substr(2, 2));
    obs.minute = digits_value(t.substr(4, 2));
    if (obs.day < 1 || obs.day > 31 || obs.hour > 23 || obs.minute > 59) {
      fail(ErrorCode::OutOfRange, cur(), "observation time out of range");
    }
  }
  ++i;

  while (i < toks.size() && (cur().text == "AUTO" || cur().text == "COR" ||
                             (cur().text.size() == 3 && cur().text.substr(0, 2) == "CC"))) {
    ++i;
  }
  if (i < toks.size() && cur().text == "NIL") fail(ErrorCode::MissingGroup, cur(), "NIL report");

  // Wind.
  if (i >= toks.size()) fail(ErrorCode::MissingGroup, end_tok, "missing wind group");
  if (is_missing_wind(cur().text)) fail(ErrorCode::MissingGroup, cur(), "wind not reported");
  auto wind = match_wind(cur().text);
  if (!wind) {
    std::size_t used = 0;
    if (match_visibility(toks, i, used) || looks_like_temp_group(cur().text) || is_pressure(cur().text)) {
      fail(ErrorCode::MissingGroup, cur(), "missing wind group");
    }
    fail(ErrorCode::MalformedReport, cur(), "expected wind group");
  }
  if (!wind->variable && wind->dir > 360) fail(ErrorCode::OutOfRange, cur(), "wind direction above 360");
  obs.wind_variable = wind->variable;
  obs.speed_unit = wind->unit;
  obs.reported_speed = wind->speed;
  obs.reported_gust = wind->gust;
  obs.wind_speed_kt = speed_in_knots(wind->speed, wind->unit, wind->kmh);
  if (wind->gust) obs.wind_gust_kt = speed_in_knots(*wind->gust, wind->unit, wind->kmh);
  if (wind->kmh) {
    // Re-express km/h reports in knots so the canonical form stays in one unit.
    obs.reported_speed = static_cast<int>(std::lround(obs.wind_speed_kt));
    obs.wind_speed_kt = obs.reported_speed;
    if (obs.wind_gust_kt) {
      obs.reported_gust = static_cast<int>(std::lround(*obs.wind_gust_kt));
      obs.wind_gust_kt = static_cast<double>(*obs.reported_gust);
    }
  }
  obs.wind_dir_deg = wind->variable ? 0 : wind->dir % 360;
  if (obs.reported_speed == 0 && !obs.wind_variable) obs.wind_dir_deg = 0;
  ++i;
  if (i < toks.size() && is_wind_variation(cur().text)) ++i;

  // Visibility.
  if (i >= toks.size()) fail(ErrorCode::MissingGroup, end_tok, "missing visibility group");
  bool cavok = cur().text == "CAVOK";
  {
    std::size_t used = 0;
    auto vis = match_visibility(toks, i, used);
    if (!vis) {
      if (looks_like_temp_group(cur().text) || is_pressure(cur().text) || is_cloud(cur().text) ||
          is_present_weather(cur().text) || cur().text == "////") {
        fail(ErrorCode::MissingGroup, cur(), "missing visibility group");
      }
      fail(ErrorCode::MalformedReport, cur(), "expected visibility group");
    }
    obs.visibility_m = *vis;
    i += used;
  }
  if (!cavok && i < toks.size() && is_directional_min_visibility(cur().text)) ++i;

  // Permissive section: RVR, present weather, clouds. Ends at the temperature group.
  bool have_temp = false;
  while (i < toks.size()) {
    std::string_view t = cur().text;
    if (looks_like_temp_group(t)) break;
    if (is_pressure(t) || is_section_end(t)) fail(ErrorCode::MissingGroup, cur(), "missing temperature group");
    if (is_rvr(t) || is_present_weather(t) || is_cloud(t) || is_slashes(t)) {
      ++i;
      continue;
    }
    std::size_t used = 0;
    if (match_wind(t) || match_visibility(toks, i, used)) fail(ErrorCode::MalformedReport, cur(), "group out of order");
    fail(ErrorCode::MalformedReport, cur(), "unrecognized group");
  }
  if (i >= toks.size()) fail(ErrorCode::MissingGroup, end_tok, "missing temperature group");
  {
    const Token& tok = cur();
    std::string_view t = tok.text;
    auto slash = t.find('/');
    std::string_view ts = t.substr(0, slash);
    std::string_view ds = t.substr(slash + 1);
    if (!is_temp_value(ts)) fail(ErrorCode::MissingGroup, tok, "temperature not reported");
    if (!is_temp_value(ds)) fail(ErrorCode::MissingGroup, tok, "dewpoint not reported");
    obs.temp_c = temp_value(ts);
    obs.dewpoint_c = temp_value(ds);
    try {
      obs.humidity_pct = relative_humidity(obs.temp_c, obs.dewpoint_c);
    } catch (const Error& e) {
      fail(ErrorCode::OutOfRange, tok, e.what());
    }
    have_temp = true;
    ++i;
  }
  (void)have_temp;

  // Pressure: the next non-remark token.
  while (i < toks.size() && !is_pressure(cur().text)) {
    if (is_section_end(cur().text)) break;
    if (looks_like_temp_group(cur().text) || match_wind(cur().text)) {
      fail(ErrorCode::MalformedReport, cur(), "group out of order");
    }
    ++i;
  }
  if (i >= toks.size() || !is_pressure(cur().text)) fail(ErrorCode::MissingGroup, cur(), "missing pressure group");
  {
    std::string_view p = cur().text;
    int v = digits_value(p.substr(1));
    if (p[0] == 'Q') {
      if (v < 850 || v > 1090) fail(ErrorCode::OutOfRange, cur(), "QNH outside 850..1090 hPa");
      obs.pressure_unit = PressureUnit::Hectopascal;
      obs.pressure_hpa = v;
    } else {
      if (v < 2500 || v > 3250) fail(ErrorCode::OutOfRange, cur(), "altimeter outside 25.00..32.50 inHg");
      obs.pressure_unit = PressureUnit::InchesHg;
      obs.pressure_hpa = v / 100.0 * kHpaPerInHg;
    }
    obs.reported_pressure = v;
  }
  return obs;
}

std::string emit_canonical(const WeatherObservation& obs) {
  std::string out = obs.station;
  out += ' ';
  out += pad(obs.day, 2) + pad(obs.hour, 2) + pad(obs.minute, 2) + "Z ";
  if (obs.wind_variable) {
    out += "VRB";
  } else if (obs.reported_speed == 0) {
    out += "000";
  } else {
    out += pad(obs.wind_dir_deg == 0 ? 360 : obs.wind_dir_deg, 3);
  }
  out += pad(obs.reported_speed, 2);
  if (obs.reported_gust) out += "G" + pad(*obs.reported_gust, 2);
  out += obs.speed_unit == SpeedUnit::MetersPerSecond ? "MPS " : "KT ";
  out += obs.visibility_m >= kMaxVisibility ? std::string("9999") : pad(obs.visibility_m, 4);
  out += ' ';
  auto temp = [](int t) { return t < 0 ? "M" + pad(-t, 2) : pad(t, 2); };
  out += temp(obs.temp_c) + "/" + temp(obs.dewpoint_c) + " ";
  out += (obs.pressure_unit == PressureUnit::Hectopascal ? "Q" : "A") + pad(obs.reported_pressure, 4);
  return out;
}

EpochSeconds resolve_time(const WeatherObservation& obs, int year, unsigned month) {
  Date d = make_date(year, month, static_cast<unsigned>(obs.day));
  if (!d.ok()) throw Error(ErrorCode::OutOfRange, "day " + std::to_string(obs.day) + " not in month");
  return day_start(d) + obs.hour * 3600 + obs.minute * 60;
}

std::optional<FileContext> parse_context_line(std::string_view line) {
  constexpr std::string_view kPrefix = "#CONTEXT";
  if (line.substr(0, kPrefix.size()) != kPrefix) return std::nullopt;
  FileContext ctx;
  bool have_year = false;
  bool have_month = false;
  for (const auto& tok : tokenize(line.substr(kPrefix.size()))) {
    auto eq = tok.text.find('=');
    if (eq == std::string_view::npos) continue;
    std::string_view key = tok.text.substr(0, eq);
    std::string_view val = tok.text.substr(eq + 1);
    if (key == "year" && all_digits(val) && val.size() == 4) {
      ctx.year = digits_value(val);
      have_year = true;
    } else if (key == "month" && all_digits(val) && val.size() <= 2) {
      ctx.month = static_cast<unsigned>(digits_value(val));
      have_month = ctx.month >= 1 && ctx.month <= 12;
    } else if (key == "station_default") {
      ctx.station_default = std::string(val);
    }
  }
  if (!have_year || !have_month) return std::nullopt;
  return ctx;
}

std::string format_context_line(const FileContext& ctx) {
  std::string out = "#CONTEXT year=" + pad(ctx.year, 4) + " month=" + pad(static_cast<int>(ctx.month), 2);
  if (!ctx.station_default.empty()) out += " station_default=" + ctx.station_default;
  return out;
}

MetarFileResult parse_metar_text(std::string_view text, std::optional<FileContext> fallback) {
  MetarFileResult result;
  std::optional<FileContext> ctx = std::move(fallback);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (auto c = parse_context_line(line)) ctx = std::move(c);
      continue;
    }
    std::string body(line);
    if (ctx && !ctx->station_default.empty()) {
      auto first = body.substr(0, body.find(' '));
      if (is_time_group(first)) body = ctx->station_default + " " + body;
    }
    try {
      auto obs = parse_metar(body);
      if (ctx) obs.obs_time = resolve_time(obs, ctx->year, ctx->month);
      result.observations.push_back(std::move(obs));
    } catch (const Error& e) {
      result.rejected.push_back({line_no, e.what()});
    }
  }
  return result;
}

}  // namespace aeroflow::metar
