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
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aeroflow {

/// UTC seconds since the Unix epoch.
using EpochSeconds = std::int64_t;
using Date = std::chrono::year_month_day;

inline constexpr EpochSeconds kSecondsPerDay = 86400;
inline constexpr EpochSeconds kBucketSeconds = 900;
inline constexpr int kBucketsPerDay = 96;

EpochSeconds day_start(Date d);
Date date_of(EpochSeconds t);
Date make_date(int year, unsigned month, unsigned day);

/// Monday = 0 ... Sunday = 6.
int day_of_week(Date d);
/// 1-based ordinal day within the year.
int day_of_year(Date d);
int days_in_year(int year);

std::string format_date(Date d);      // 2024-03-01
std::string format_yyyymmdd(Date d);  // 20240301
std::string format_iso(EpochSeconds t);  // 2024-03-01T12:15:00Z

/// Accepts YYYY-MM-DD or YYYYMMDD. Throws Error{FormatError}.
Date parse_date(std::string_view s);
/// Accepts YYYY-MM-DDTHH:MM:SSZ (the trailing Z is required). Throws Error{FormatError}.
EpochSeconds parse_iso(std::string_view s);

/// Inclusive day range, written "a..b" on the command line and on the wire.
struct DateRange {
  Date first;
  Date last;

  std::vector<Date> days() const;
  std::size_t size() const;
  std::string to_string() const;
};

/// Parses "a..b" or a single date. Throws Error{FormatError} or Error{EmptyRange} when b < a.
DateRange parse_range(std::string_view s);

inline bool bucket_aligned(EpochSeconds t) { return t % kBucketSeconds == 0; }

}  // namespace aeroflow
