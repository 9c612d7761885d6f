/*
 * Copyright 2026 The fairrank Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fairrank/error.h"

namespace fairrank {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kNonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::kOutOfRangeU: return "OutOfRangeU";
    case ErrorCode::kMissingGroup: return "MissingGroup";
    case ErrorCode::kUnknownGroup: return "UnknownGroup";
    case ErrorCode::kDuplicatePosition: return "DuplicatePosition";
    case ErrorCode::kPositionGap: return "PositionGap";
    case ErrorCode::kInvalidPosition: return "InvalidPosition";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kNoImpressionsAtPosition: return "NoImpressionsAtPosition";
    case ErrorCode::kZeroBaseCTR: return "ZeroBaseCTR";
    case ErrorCode::kEmptyPosition: return "EmptyPosition";
    case ErrorCode::kNoPositivesAtPosition: return "NoPositivesAtPosition";
    case ErrorCode::kDegenerateDensity: return "DegenerateDensity";
    case ErrorCode::kNoPositivesInGroup: return "NoPositivesInGroup";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kScoreOutOfUnitInterval: return "ScoreOutOfUnitInterval";
    case ErrorCode::kMissingWeightForPosition: return "MissingWeightForPosition";
    case ErrorCode::kEmptyStratum: return "EmptyStratum";
    case ErrorCode::kSingleGroup: return "SingleGroup";
    case ErrorCode::kInconsistentDimensions: return "InconsistentDimensions";
    case ErrorCode::kBinOutOfRange: return "BinOutOfRange";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kUnbounded: return "Unbounded";
    case ErrorCode::kIterationLimit: return "IterationLimit";
    case ErrorCode::kMalformedProblem: return "MalformedProblem";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSlotsExceedPopulation: return "SlotsExceedPopulation";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kScorerFailure: return "ScorerFailure";
    case ErrorCode::kNonBinaryLabels: return "NonBinaryLabels";
    case ErrorCode::kMissingTruth: return "MissingTruth";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace fairrank
