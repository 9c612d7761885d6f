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

#ifndef FAIRRANK_SCORE_MAP_H_
#define FAIRRANK_SCORE_MAP_H_

#include <string>

namespace fairrank {

// Canonical rank-preserving map from real scores to (0, 1). Throws
// NonFiniteInput.
double inverse_logit(double score);

// Inverse of inverse_logit on (0, 1). Throws NonFiniteInput outside.
double logit(double p);

// inverse_logit clamped into [0, 1) so the result always falls in a
// partition interval; scores above ~36.7 round to 1.0 in double precision.
double to_unit_interval(double score);

// How raw scores reach [0, 1) before binning.
enum class ScoreMap { kIdentity, kInverseLogit };

const char* to_string(ScoreMap map);
ScoreMap score_map_from_string(const std::string& name);

// kIdentity requires the score to already lie in [0, 1) and passes it
// through; kInverseLogit applies to_unit_interval.
double apply_score_map(ScoreMap map, double score);

}  // namespace fairrank

#endif  // FAIRRANK_SCORE_MAP_H_
