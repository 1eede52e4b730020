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

#include "aeroflow/eval/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "aeroflow/core/error.hpp"
#include "aeroflow/core/rng.hpp"

namespace aeroflow::eval {

namespace {

void check_lengths(const EvaluationSeries& s) {
  if (s.y.empty()) throw Error(ErrorCode::LengthMismatch, "empty series");
  if (s.predictions.size() != s.y.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(s.y.size()) + " targets vs " +
                                               std::to_string(s.predictions.size()) + " predictions");
  }
  if (!s.alt_y.empty() && s.alt_y.size() != s.y.size()) {
    throw Error(ErrorCode::LengthMismatch, "alternatives not aligned with targets");
  }
}

double denominator(const std::vector<double>& y) {
  double sum = 0.0;
  for (double v : y) sum += v;
  const double m = sum / static_cast<double>(y.size());
  return m > 0.0 ? m : 1.0;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

double score(const EvaluationSeries& s) {
  check_lengths(s);
  const double m = denominator(s.y);
  double total = 0.0;
  for (std::size_t t = 0; t < s.y.size(); ++t) total += std::exp(-std::abs(s.y[t] - s.predictions[t]) / m);
  return total / static_cast<double>(s.y.size());
}

double score_ambiguous(const EvaluationSeries& s) {
  check_lengths(s);
  const double m = denominator(s.y);
  double total = 0.0;
  for (std::size_t t = 0; t < s.y.size(); ++t) {
    const double yhat = s.predictions[t];
    double term = std::exp(-std::abs(s.y[t] - yhat) / m);
    if (!s.alt_y.empty() && !s.alt_y[t].empty()) {
      const auto& alts = s.alt_y[t];
      if (alts.size() > 2) throw Error(ErrorCode::TooManyCandidates, "index " + std::to_string(t) + " has " +
                                                                         std::to_string(alts.size() + 1) + " truths");
      for (double a : alts) term += std::exp(-std::abs(a - yhat) / m);
      term /= static_cast<double>(alts.size() + 1);
    }
    total += term;
  }
  return total / static_cast<double>(s.y.size());
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, const CvConfig& cfg) {
  if (cfg.k < 2 || static_cast<std::size_t>(cfg.k) > n) {
    throw Error(ErrorCode::BadConfig, "need 2 <= k <= n (k=" + std::to_string(cfg.k) + ", n=" + std::to_string(n) + ")");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(cfg.seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  const auto k = static_cast<std::size_t>(cfg.k);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos), perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

CvResult cross_validate(const pipeline::Dataset& data, ml::ModelKind kind, const ml::Hyper& hyper, const CvConfig& cfg) {
  const auto folds = kfold_split(data.rows, cfg);
  const bool ambiguous = data.has_alternatives();
  CvResult result;
  std::vector<char> in_fold(data.rows);
  for (const auto& fold : folds) {
    std::fill(in_fold.begin(), in_fold.end(), 0);
    for (auto i : fold) in_fold[i] = 1;
    std::vector<std::size_t> train_idx;
    train_idx.reserve(data.rows - fold.size());
    for (std::size_t i = 0; i < data.rows; ++i) {
      if (!in_fold[i]) train_idx.push_back(i);
    }
    const auto model = ml::train(kind, data.subset(train_idx), hyper);
    EvaluationSeries s;
    for (auto i : fold) {
      s.y.push_back(data.y[i]);
      s.predictions.push_back(ml::predict(model, data.row(i)));
      if (ambiguous) s.alt_y.push_back(data.alt_y[i]);
    }
    result.fold_scores.push_back(ambiguous ? score_ambiguous(s) : score(s));
  }
  result.mean = std::accumulate(result.fold_scores.begin(), result.fold_scores.end(), 0.0) /
                static_cast<double>(result.fold_scores.size());
  return result;
}

std::vector<Candidate> default_candidates(std::uint64_t seed) {
  ml::Hyper h;
  h.seed = seed;
  std::vector<Candidate> out;
  for (const auto& entry : ml::registry()) out.push_back({entry.kind, h});
  return out;
}

Selection select_model(const pipeline::Dataset& data, const std::vector<Candidate>& candidates, const CvConfig& cfg) {
  if (candidates.empty()) throw Error(ErrorCode::AllCandidatesFailed, "no candidates");
  Selection sel;
  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto& cand = candidates[c];
    LeaderboardRow row{cand.kind, cand.hyper.describe(cand.kind), {}, false, {}};
    try {
      row.cv = cross_validate(data, cand.kind, cand.hyper, cfg);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BadConfig) throw;
      row.failed = true;
      row.error = e.what();
    }
    if (!row.failed) {
      const bool better =
          !best || row.cv.mean > sel.leaderboard[*best].cv.mean ||
          (row.cv.mean == sel.leaderboard[*best].cv.mean && cand.kind < sel.leaderboard[*best].kind);
      if (better) best = c;
    }
    sel.leaderboard.push_back(std::move(row));
  }
  if (!best) throw Error(ErrorCode::AllCandidatesFailed, "every candidate failed to train");
  sel.best_kind = candidates[*best].kind;
  sel.best_score = sel.leaderboard[*best].cv.mean;
  sel.model = ml::train(sel.best_kind, data, candidates[*best].hyper);
  return sel;
}

std::vector<ScatterRow> score_scatter(const std::vector<SectorResult>& results) {
  std::vector<ScatterRow> rows;
  rows.reserve(results.size());
  for (const auto& r : results) {
    double avg = 0.0;
    if (!r.daily_entries.empty()) {
      avg = std::accumulate(r.daily_entries.begin(), r.daily_entries.end(), 0.0) /
            static_cast<double>(r.daily_entries.size());
    }
    rows.push_back({r.sector, avg, r.raw_score, r.balanced_score});
  }
  return rows;
}

Histogram score_histogram(std::span<const double> scores, int bin_count) {
  if (bin_count < 1) throw Error(ErrorCode::BadBinCount, "bin count must be >= 1");
  if (scores.empty()) throw Error(ErrorCode::LengthMismatch, "no scores to bin");
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bin_count), 0);
  for (int i = 0; i <= bin_count; ++i) h.edges.push_back(static_cast<double>(i) / bin_count);
  double sum = 0.0;
  for (double s : scores) {
    const double c = std::clamp(s, 0.0, 1.0);
    const int bin = std::min(bin_count - 1, static_cast<int>(c * bin_count));
    ++h.counts[static_cast<std::size_t>(bin)];
    sum += s;
  }
  h.mean = sum / static_cast<double>(scores.size());
  return h;
}

std::string scatter_csv(const std::vector<ScatterRow>& rows) {
  std::string out = "sector,avg_daily_count,raw_score,balanced_score\n";
  for (const auto& r : rows) {
    out += r.sector + ',' + fmt(r.avg_daily_count) + ',' + fmt(r.raw_score) + ',' + fmt(r.balanced_score) + '\n';
  }
  return out;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += fmt(h.edges[i]) + ',' + fmt(h.edges[i + 1]) + ',' + std::to_string(h.counts[i]) + '\n';
  }
  return out;
}

}  // namespace aeroflow::eval
