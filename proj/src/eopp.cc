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

#include "fairrank/eopp.h"

#include <string>
#include <vector>

#include "fairrank/error.h"

namespace fairrank {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "alpha " + std::to_string(alpha) + " outside [0, 1]");
  }
}

}  // namespace

EoppModel EoppModel::with_alpha(double new_alpha) const {
  check_alpha(new_alpha);
  EoppModel m = *this;
  m.alpha = new_alpha;
  return m;
}

EoppModel train_eopp(const ValidatedDataset& data, const PositionWeights& weights,
                     const EoppOptions& options) {
  check_alpha(options.alpha);
  std::map<GroupId, std::vector<double>> pos_scores;
  std::map<GroupId, std::vector<double>> pos_weights;
  for (GroupId g : data.groups()) {
    pos_scores[g];
    pos_weights[g];
  }
  std::vector<double> all_scores;
  all_scores.reserve(data.size());
  for (const ImpressionRecord& r : data.records()) {
    all_scores.push_back(r.score);
    if (r.label > 0) {
      pos_scores[r.group].push_back(r.score);
      pos_weights[r.group].push_back(1.0 / weights.at(r.position));
    }
  }

  EoppModel model;
  model.alpha = options.alpha;
  model.rescale = options.rescale;
  model.position_weights = weights;
  for (GroupId g : data.groups()) {
    if (pos_scores[g].empty()) {
      throw Error(ErrorCode::kNoPositivesInGroup,
                  "group " + std::to_string(g) + " has no positive labels");
    }
    model.per_group_cdf.emplace(g, empirical_cdf(pos_scores[g], pos_weights[g]));
  }

  std::vector<double> transformed;
  transformed.reserve(data.size());
  for (const ImpressionRecord& r : data.records()) {
    transformed.push_back(model.per_group_cdf.at(r.group)(r.score));
  }
  model.pooled_pre_cdf = empirical_cdf(all_scores);
  model.pooled_post_cdf = empirical_cdf(transformed);

  if (options.discretize_step) {
    const double step = *options.discretize_step;
    for (auto& [g, cdf] : model.per_group_cdf) cdf = cdf.discretized(step);
    model.pooled_pre_cdf = model.pooled_pre_cdf.discretized(step);
    model.pooled_post_cdf = model.pooled_post_cdf.discretized(step);
  }
  return model;
}

double eopp_uniform_score(const EoppModel& model, double score, GroupId group) {
  auto it = model.per_group_cdf.find(group);
  if (it == model.per_group_cdf.end()) {
    throw Error(ErrorCode::kUnknownGroup,
                "group " + std::to_string(group) + " not in the model");
  }
  return it->second(score);
}

double score_eopp(const EoppModel& model, double score, GroupId group) {
  const double u = eopp_uniform_score(model, score, group);
  if (model.alpha == 0.0) return score;
  const double fair =
      model.rescale ? model.pooled_pre_cdf.quantile(model.pooled_post_cdf(u)) : u;
  return model.alpha * fair + (1.0 - model.alpha) * score;
}

}  // namespace fairrank
