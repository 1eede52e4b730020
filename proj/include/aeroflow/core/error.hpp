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

#include <stdexcept>
#include <string>
#include <string_view>

namespace aeroflow {

enum class ErrorCode {
  // metar
  MalformedReport,
  MissingGroup,
  OutOfRange,
  // traffic
  InvalidScenario,
  FormatError,
  // store
  StorageFull,
  ValidationError,
  NotFound,
  SchemaMismatch,
  // pipeline
  RawMissing,
  NotPrepared,
  NoWeather,
  EmptyRange,
  // ml
  EmptyDataset,
  SingularSystem,
  BadHyper,
  // eval
  LengthMismatch,
  TooManyCandidates,
  BadConfig,
  AllCandidatesFailed,
  BadBinCount,
  // services
  NoPredictor,
  InsufficientData,
  NoClassifier,
  NoTopology,
  // mesh
  CycleDetected,
  UnknownService,
  LayerViolation,
  PortInUse,
  MissingModels,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every recoverable failure in the platform. The code is
/// the machine-readable part; what() carries a human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aeroflow
