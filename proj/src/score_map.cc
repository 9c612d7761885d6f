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

#include "fairrank/score_map.h"

#include <cmath>
#include <limits>
#include <string>

#include "fairrank/error.h"

namespace fairrank {

double inverse_logit(double score) {
  if (!std::isfinite(score)) {
    throw Error(ErrorCode::kNonFiniteInput, "inverse_logit of non-finite score");
  }
  // Evaluate on the side that avoids overflow of exp().
  if (score >= 0.0) return 1.0 / (1.0 + std::exp(-score));
  const double e = std::exp(score);
  return e / (1.0 + e);
}

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kNonFiniteInput,
                "logit undefined at " + std::to_string(p));
  }
  return std::log(p) - std::log1p(-p);
}

double to_unit_interval(double score) {
  const double p = inverse_logit(score);
  return p < 1.0 ? p : std::nextafter(1.0, 0.0);
}

const char* to_string(ScoreMap map) {
  return map == ScoreMap::kIdentity ? "identity" : "inverse_logit";
}

ScoreMap score_map_from_string(const std::string& name) {
  if (name == "identity") return ScoreMap::kIdentity;
  if (name == "inverse_logit") return ScoreMap::kInverseLogit;
  throw Error(ErrorCode::kSchemaMismatch, "unknown score map '" + name + "'");
}

double apply_score_map(ScoreMap map, double score) {
  if (map == ScoreMap::kInverseLogit) return to_unit_interval(score);
  if (!(score >= 0.0 && score < 1.0)) {
    throw Error(ErrorCode::kScoreOutOfUnitInterval,
                "score " + std::to_string(score) + " not in [0, 1)");
  }
  return score;
}

}  // namespace fairrank
