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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace oracle {

namespace {

constexpr long long kDay = 86400;
constexpr long long kBucket = 900;

struct Span {
  int flight;
  long long entry;
  long long exit;
  bool closed;
};

}  // namespace

Day occupancy_oracle(const std::vector<Event>& events, const std::string& sector, long long day_start) {
  Day day;
  const long long day_end = day_start + kDay;

  // Keep this sector's crossing events, first copy of each exact repeat.
  std::vector<Event> mine;
  std::set<std::tuple<std::string, int, long long>> seen;
  std::vector<Event> by_seq = events;
  std::stable_sort(by_seq.begin(), by_seq.end(), [](const Event& a, const Event& b) { return a.seq < b.seq; });
  for (const auto& e : by_seq) {
    if (e.resource != sector) continue;
    if (e.kind != kEntry && e.kind != kExit) continue;
    if (e.flight.empty() || e.ts < day_start || e.ts >= day_end) {
      ++day.skipped;
      continue;
    }
    if (!seen.insert({e.flight, e.kind, e.ts}).second) {
      ++day.skipped;
      continue;
    }
    mine.push_back(e);
  }

  std::map<std::string, int> flight_index;
  std::map<std::string, std::vector<Event>> per_flight;
  for (const auto& e : mine) {
    per_flight[e.flight].push_back(e);
    flight_index.emplace(e.flight, static_cast<int>(flight_index.size()));
  }

  std::vector<Span> spans;
  for (auto& [flight, list] : per_flight) {
    std::sort(list.begin(), list.end(), [](const Event& a, const Event& b) {
      if (a.ts != b.ts) return a.ts < b.ts;
      return a.seq < b.seq;
    });
    const int f = flight_index[flight];
    bool open = false;
    long long since = 0;
    for (const auto& e : list) {
      if (e.kind == kEntry) {
        if (open) spans.push_back({f, since, day_end, false});
        open = true;
        since = e.ts;
      } else if (open) {
        spans.push_back({f, since, e.ts, true});
        open = false;
      } else {
        ++day.skipped;
      }
    }
    if (open) spans.push_back({f, since, day_end, false});
  }

  for (const auto& s : spans) {
    day.entries[static_cast<std::size_t>((s.entry - day_start) / kBucket)] += 1;
    if (s.closed) day.exits[static_cast<std::size_t>((s.exit - day_start) / kBucket)] += 1;
  }

  // Second-by-second presence.
  std::vector<long long> entry(spans.size());
  std::vector<long long> exit(spans.size());
  std::vector<int> owner(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    entry[i] = spans[i].entry;
    exit[i] = spans[i].exit;
    owner[i] = spans[i].flight;
  }
  std::vector<char> present(flight_index.size());
  for (int b = 0; b < 96; ++b) {
    std::fill(present.begin(), present.end(), 0);
    const long long lo = day_start + b * kBucket;
    for (long long s = lo; s < lo + kBucket; ++s) {
      for (std::size_t i = 0; i < spans.size(); ++i) {
        if (entry[i] <= s && s < exit[i]) present[static_cast<std::size_t>(owner[i])] = 1;
      }
    }
    int n = 0;
    for (char p : present) n += p;
    day.occupancy[static_cast<std::size_t>(b)] = n;
  }
  return day;
}

double eq1_oracle(const std::vector<double>& y, const std::vector<std::vector<double>>& alt,
                  const std::vector<double>& yhat) {
  const std::size_t n = y.size();
  long double total_y = 0.0L;
  for (std::size_t t = 0; t < n; ++t) total_y += y[t];
  double m = static_cast<double>(total_y / static_cast<long double>(n));
  if (!(m > 0.0)) m = 1.0;
  long double acc = 0.0L;
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> truths{y[t]};
    if (!alt.empty()) truths.insert(truths.end(), alt[t].begin(), alt[t].end());
    long double inner = 0.0L;
    for (double v : truths) inner += std::exp(-std::fabs(v - yhat[t]) / m);
    acc += inner / static_cast<long double>(truths.size());
  }
  return static_cast<double>(acc / static_cast<long double>(n));
}

namespace {

double sse(const std::vector<double>& r, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  long double mean = 0.0L;
  for (auto i : rows) mean += r[i];
  mean /= static_cast<long double>(rows.size());
  long double s = 0.0L;
  for (auto i : rows) s += (r[i] - mean) * (r[i] - mean);
  return static_cast<double>(s);
}

}  // namespace

double split_gain(const std::vector<double>& x, std::size_t cols, const std::vector<double>& r,
                  const std::vector<std::size_t>& rows, int feature, double threshold) {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  for (auto i : rows) (x[i * cols + static_cast<std::size_t>(feature)] <= threshold ? left : right).push_back(i);
  return sse(r, rows) - sse(r, left) - sse(r, right);
}

SplitResult exhaustive_split(const std::vector<double>& x, std::size_t cols, const std::vector<double>& r,
                             const std::vector<std::size_t>& rows, int min_leaf) {
  SplitResult best;
  for (std::size_t j = 0; j < cols; ++j) {
    std::vector<double> vals;
    for (auto i : rows) vals.push_back(x[i * cols + j]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
      double thr = (vals[k] + vals[k + 1]) / 2.0;
      if (!(thr < vals[k + 1])) thr = vals[k];
      std::size_t n_left = 0;
      for (auto i : rows) n_left += x[i * cols + j] <= thr ? 1 : 0;
      if (n_left < static_cast<std::size_t>(min_leaf) || rows.size() - n_left < static_cast<std::size_t>(min_leaf)) {
        continue;
      }
      const double g = split_gain(x, cols, r, rows, static_cast<int>(j), thr);
      if (g > best.gain) best = {static_cast<int>(j), thr, g};
    }
  }
  return best;
}

}  // namespace oracle
