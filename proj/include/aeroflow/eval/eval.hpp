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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aeroflow/ml/model.hpp"
#include "aeroflow/pipeline/dataset.hpp"

namespace aeroflow::eval {

/// Ground truth, optional alternative truths (at most two per index) and
/// predictions, all of length N.
struct EvaluationSeries {
  std::vector<double> y;
  std::vector<std::vector<double>> alt_y;  // empty, or one entry per index
  std::vector<double> predictions;
};

/// A = (1/N) sum exp(-|y_t - yhat_t| / m), m = mean(y) when positive, else 1.
/// Throws Error{LengthMismatch}.
double score(const EvaluationSeries& series);

/// Per index, the term is averaged over {y_t} and its alternatives; m still
/// comes from the primary y. Throws Error{LengthMismatch, TooManyCandidates}.
double score_ambiguous(const EvaluationSeries& series);

struct CvConfig {
  int k = 5;
  std::uint64_t seed = 0;
};

/// Seeded uniform shuffle, then contiguous chunks; the first n % k folds get
/// one extra index. Throws Error{BadConfig} unless 2 <= k <= n.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, const CvConfig& cfg);

struct CvResult {
  std::vector<double> fold_scores;
  double mean = 0.0;
};

/// Trains on each fold's complement and scores the fold, with the ambiguity
/// balanced score whenever the dataset carries alternatives.
CvResult cross_validate(const pipeline::Dataset& data, ml::ModelKind kind, const ml::Hyper& hyper,
                        const CvConfig& cfg);

struct Candidate {
  ml::ModelKind kind;
  ml::Hyper hyper;
};

/// MEAN, RIDGE, KNN and GBM with their default hyperparameters.
std::vector<Candidate> default_candidates(std::uint64_t seed = 0);

struct LeaderboardRow {
  ml::ModelKind kind;
  std::string hyper;
  CvResult cv;
  bool failed = false;
  std::string error;
};

struct Selection {
  ml::ModelKind best_kind;
  double best_score = 0.0;
  ml::TrainedModel model;  // winner retrained on the full dataset
  std::vector<LeaderboardRow> leaderboard;
};

/// Highest CV mean wins; ties go to the earlier registry kind, then the
/// earlier candidate. Throws Error{AllCandidatesFailed}.
Selection select_model(const pipeline::Dataset& data, const std::vector<Candidate>& candidates, const CvConfig& cfg);

struct SectorResult {
  std::string sector;
  std::vector<double> daily_entries;  // sum of entries per evaluated day
  double raw_score = 0.0;
  double balanced_score = 0.0;
};

struct ScatterRow {
  std::string sector;
  double avg_daily_count = 0.0;
  double raw_score = 0.0;
  double balanced_score = 0.0;
};

std::vector<ScatterRow> score_scatter(const std::vector<SectorResult>& results);

struct Histogram {
  std::vector<double> edges;  // bin_count + 1 edges over [0, 1]
  std::vector<std::size_t> counts;
  double mean = 0.0;
};

/// Uniform bins over [0, 1]; a score of exactly 1 falls in the last bin.
/// Throws Error{BadBinCount}, Error{LengthMismatch} for an empty sample.
Histogram score_histogram(std::span<const double> scores, int bin_count);

std::string scatter_csv(const std::vector<ScatterRow>& rows);
std::string histogram_csv(const Histogram& h);

}  // namespace aeroflow::eval
