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

#include "aeroflow/core/time.hpp"

#include <charconv>
#include <cstdio>

#include "aeroflow/core/error.hpp"

namespace aeroflow {

namespace {

using namespace std::chrono;

int parse_fixed(std::string_view s, std::size_t pos, std::size_t len, std::string_view whole) {
  int v = 0;
  if (pos + len > s.size()) throw Error(ErrorCode::FormatError, "truncated time value '" + std::string(whole) + "'");
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
  if (ec != std::errc() || ptr != s.data() + pos + len) {
    throw Error(ErrorCode::FormatError, "bad digits in '" + std::string(whole) + "'");
  }
  return v;
}

void expect_char(std::string_view s, std::size_t pos, char c) {
  if (pos >= s.size() || s[pos] != c) {
    throw Error(ErrorCode::FormatError, "expected '" + std::string(1, c) + "' in '" + std::string(s) + "'");
  }
}

}  // namespace

EpochSeconds day_start(Date d) {
  return static_cast<EpochSeconds>(sys_days(d).time_since_epoch().count()) * kSecondsPerDay;
}

Date date_of(EpochSeconds t) {
  auto days_since = t >= 0 ? t / kSecondsPerDay : -((-t + kSecondsPerDay - 1) / kSecondsPerDay);
  return Date(sys_days(days(days_since)));
}

Date make_date(int y, unsigned m, unsigned d) { return Date(year(y), month(m), day(d)); }

int day_of_week(Date d) {
  weekday wd(sys_days{d});
  return static_cast<int>(wd.iso_encoding()) - 1;
}

int day_of_year(Date d) {
  auto jan1 = sys_days(year_month_day(d.year(), January, day(1)));
  return static_cast<int>((sys_days(d) - jan1).count()) + 1;
}

int days_in_year(int y) { return year(y).is_leap() ? 366 : 365; }

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

std::string format_yyyymmdd(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

std::string format_iso(EpochSeconds t) {
  Date d = date_of(t);
  EpochSeconds sod = t - day_start(d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(d).c_str(), static_cast<int>(sod / 3600),
                static_cast<int>(sod / 60 % 60), static_cast<int>(sod % 60));
  return buf;
}

Date parse_date(std::string_view s) {
  int y = 0;
  int m = 0;
  int dd = 0;
  if (s.size() == 10) {
    y = parse_fixed(s, 0, 4, s);
    expect_char(s, 4, '-');
    m = parse_fixed(s, 5, 2, s);
    expect_char(s, 7, '-');
    dd = parse_fixed(s, 8, 2, s);
  } else if (s.size() == 8) {
    y = parse_fixed(s, 0, 4, s);
    m = parse_fixed(s, 4, 2, s);
    dd = parse_fixed(s, 6, 2, s);
  } else {
    throw Error(ErrorCode::FormatError, "bad date '" + std::string(s) + "'");
  }
  Date d(year(y), month(static_cast<unsigned>(m)), day(static_cast<unsigned>(dd)));
  if (!d.ok()) throw Error(ErrorCode::FormatError, "invalid calendar date '" + std::string(s) + "'");
  return d;
}

EpochSeconds parse_iso(std::string_view s) {
  if (s.size() != 20) throw Error(ErrorCode::FormatError, "bad ISO-8601 time '" + std::string(s) + "'");
  Date d = parse_date(s.substr(0, 10));
  expect_char(s, 10, 'T');
  int hh = parse_fixed(s, 11, 2, s);
  expect_char(s, 13, ':');
  int mm = parse_fixed(s, 14, 2, s);
  expect_char(s, 16, ':');
  int ss = parse_fixed(s, 17, 2, s);
  expect_char(s, 19, 'Z');
  if (hh > 23 || mm > 59 || ss > 59) throw Error(ErrorCode::FormatError, "time of day out of range '" + std::string(s) + "'");
  return day_start(d) + hh * 3600 + mm * 60 + ss;
}

std::vector<Date> DateRange::days() const {
  std::vector<Date> out;
  for (auto d = sys_days(first); d <= sys_days(last); d += std::chrono::days(1)) out.emplace_back(d);
  return out;
}

std::size_t DateRange::size() const {
  auto n = (sys_days(last) - sys_days(first)).count() + 1;
  return n > 0 ? static_cast<std::size_t>(n) : 0;
}

std::string DateRange::to_string() const { return format_date(first) + ".." + format_date(last); }

DateRange parse_range(std::string_view s) {
  auto sep = s.find("..");
  DateRange r;
  if (sep == std::string_view::npos) {
    r.first = r.last = parse_date(s);
  } else {
    r.first = parse_date(s.substr(0, sep));
    r.last = parse_date(s.substr(sep + 2));
  }
  if (sys_days(r.last) < sys_days(r.first)) {
    throw Error(ErrorCode::EmptyRange, "range end precedes start in '" + std::string(s) + "'");
  }
  return r;
}

}  // namespace aeroflow
