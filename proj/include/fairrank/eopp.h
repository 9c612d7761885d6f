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

#ifndef FAIRRANK_EOPP_H_
#define FAIRRANK_EOPP_H_

#include <map>
#include <optional>

#include "fairrank/cdf.h"
#include "fairrank/dataset.h"
#include "fairrank/position_bias.h"
#include "fairrank/types.h"

namespace fairrank {

// Position-bias adjusted equality-of-opportunity transform.
//
// For a score s in group c the fair score is F*_c(s), where F*_c is the CDF
// of group c's positive-label scores with each row weighted by 1 / w_position.
// With rescaling on, that uniform-scale value is mapped back onto the
// original score scale through pooled_pre^{-1}(pooled_post(.)), and the
// result is blended with the raw score:
//
//   out = alpha * pooled_pre^{-1}(pooled_post(F*_c(s))) + (1 - alpha) * s
struct EoppModel {
  std::map<GroupId, WeightedEmpiricalCdf> per_group_cdf;
  WeightedEmpiricalCdf pooled_pre_cdf;   // raw training scores
  WeightedEmpiricalCdf pooled_post_cdf;  // training scores after F*_c
  double alpha = 1.0;
  bool rescale = true;
  PositionWeights position_weights = PositionWeights::uniform(1);

  // Same CDFs, different blend.
  EoppModel with_alpha(double new_alpha) const;
};

struct EoppOptions {
  double alpha = 1.0;
  bool rescale = true;
  // When set, every stored CDF is discretized at this cumulative-mass step.
  std::optional<double> discretize_step;
};

// Errors: NoPositivesInGroup, MissingWeightForPosition, InvalidConfig (alpha
// outside [0, 1]).
EoppModel train_eopp(const ValidatedDataset& data, const PositionWeights& weights,
                     const EoppOptions& options = {});

// F*_c(score) in [0, 1]. Throws UnknownGroup.
double eopp_uniform_score(const EoppModel& model, double score, GroupId group);

// Blended fair score. Throws UnknownGroup.
double score_eopp(const EoppModel& model, double score, GroupId group);

}  // namespace fairrank

#endif  // FAIRRANK_EOPP_H_
