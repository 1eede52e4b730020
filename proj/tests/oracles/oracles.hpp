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

// Brute-force reference implementations for tests. Deliberately written
// against plain types so they share no code with the library.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

struct Report {
  std::string case_id;
  double expected = 0.0;
  double actual = 0.0;
  bool match = false;
};

enum Kind { kEntry = 0, kExit = 1, kDeparture = 2, kArrival = 3 };

struct Event {
  std::string flight;
  int kind = kEntry;
  std::string resource;
  long long ts = 0;
  unsigned long long seq = 0;
};

struct Day {
  std::array<int, 96> occupancy{};
  std::array<int, 96> entries{};
  std::array<int, 96> exits{};
  int skipped = 0;  // malformed, out-of-day, duplicate or unmatched events
};

/// Replays the day second by second. A flight is present at second s when
/// some interval has entry <= s < exit; a bucket's count is the number of
/// distinct flights present in any of its 900 seconds.
Day occupancy_oracle(const std::vector<Event>& events, const std::string& sector, long long day_start);

/// Mean over t of exp(-|y_t - yhat_t| / m), m = mean(y) or 1 when that is not
/// positive. With alternatives, each term is the average over the primary
/// and its alternatives.
double eq1_oracle(const std::vector<double>& y, const std::vector<std::vector<double>>& alt,
                  const std::vector<double>& yhat);

struct SplitResult {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;  // parent SSE minus children SSE
};

/// Tries every feature and every midpoint between consecutive distinct
/// values, computing children SSE directly. Rows are a row-major matrix.
SplitResult exhaustive_split(const std::vector<double>& x, std::size_t cols, const std::vector<double>& r,
                             const std::vector<std::size_t>& rows, int min_leaf);

/// SSE reduction of one given split, computed directly.
double split_gain(const std::vector<double>& x, std::size_t cols, const std::vector<double>& r,
                  const std::vector<std::size_t>& rows, int feature, double threshold);

}  // namespace oracle
