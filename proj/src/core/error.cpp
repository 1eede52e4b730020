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

#include "aeroflow/core/error.hpp"

namespace aeroflow {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedReport: return "MalformedReport";
    case ErrorCode::MissingGroup: return "MissingGroup";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::StorageFull: return "StorageFull";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::RawMissing: return "RawMissing";
    case ErrorCode::NotPrepared: return "NotPrepared";
    case ErrorCode::NoWeather: return "NoWeather";
    case ErrorCode::EmptyRange: return "EmptyRange";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::BadHyper: return "BadHyper";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooManyCandidates: return "TooManyCandidates";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::AllCandidatesFailed: return "AllCandidatesFailed";
    case ErrorCode::BadBinCount: return "BadBinCount";
    case ErrorCode::NoPredictor: return "NoPredictor";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NoClassifier: return "NoClassifier";
    case ErrorCode::NoTopology: return "NoTopology";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::UnknownService: return "UnknownService";
    case ErrorCode::LayerViolation: return "LayerViolation";
    case ErrorCode::PortInUse: return "PortInUse";
    case ErrorCode::MissingModels: return "MissingModels";
  }
  return "Unknown";
}

}  // namespace aeroflow
