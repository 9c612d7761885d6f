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

#ifndef FAIRRANK_ERROR_H_
#define FAIRRANK_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairrank {

// Every failure surfaced by the library carries one of these codes. The CLI
// prints code_name() so scripts can match on a stable token.
enum class ErrorCode {
  kEmptyInput,
  kNonFiniteInput,
  kNonPositiveWeight,
  kOutOfRangeU,
  kMissingGroup,
  kUnknownGroup,
  kDuplicatePosition,
  kPositionGap,
  kInvalidPosition,
  kLabelOutOfRange,
  kNoImpressionsAtPosition,
  kZeroBaseCTR,
  kEmptyPosition,
  kNoPositivesAtPosition,
  kDegenerateDensity,
  kNoPositivesInGroup,
  kSchemaMismatch,
  kScoreOutOfUnitInterval,
  kMissingWeightForPosition,
  kEmptyStratum,
  kSingleGroup,
  kInconsistentDimensions,
  kBinOutOfRange,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kMalformedProblem,
  kDimensionMismatch,
  kSlotsExceedPopulation,
  kInvalidConfig,
  kScorerFailure,
  kNonBinaryLabels,
  kMissingTruth,
  kParseError,
  kIoError,
};

std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fairrank

#endif  // FAIRRANK_ERROR_H_
