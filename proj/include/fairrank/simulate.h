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

#ifndef FAIRRANK_SIMULATE_H_
#define FAIRRANK_SIMULATE_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "fairrank/types.h"

namespace fairrank {

// Synthetic recommender with a known counterfactual label per item.
//
//   C_i    ~ Bernoulli(group_prob)
//   Y_i(1) ~ Bernoulli(pos_rate[C_i])
//   R_i    ~ N(0.6 Y_i(1) + 2 C_i, relevance_noise_var)
//            + (1 - C_i) Uniform[0, 1 + Y_i(1)]
//   per query: `slots` distinct items, s_i = R_i + N(0, score_noise_var),
//   ranked by descending s_i, Y(j) = Y(1) * Bernoulli(1 / log2(1 + j)).
//
// Both noise parameters are variances.
struct SimConfig {
  std::int64_t population_size = 50'000;
  double group_prob = 0.6;
  double pos_rate_group0 = 0.4;
  double pos_rate_group1 = 0.5;
  double relevance_noise_var = 0.5;
  double score_noise_var = 0.1;
  std::int32_t slots = 50;
  std::int64_t n_queries = 100'000;
  std::uint64_t seed = 7;

  // Throws InvalidConfig or SlotsExceedPopulation.
  void validate() const;
};

// Decay law used for every simulated label draw.
double simulated_decay(std::int32_t position);

struct SimLog {
  std::vector<ImpressionRecord> records;  // ordered by (query, position)
  std::vector<SimulatedItem> truth;       // indexed by item_id

  const SimulatedItem& item(std::uint64_t item_id) const;
};

std::vector<SimulatedItem> generate_population(const SimConfig& config);

// `split` separates independent query sets drawn from one population (for
// example 0 = training, 1 = validation); it is mixed into every substream and
// offsets query ids by split * 10^9.
SimLog generate_queries(const std::vector<SimulatedItem>& population,
                        const SimConfig& config, std::uint64_t split = 0);

// Maps one logged row to its transformed score.
using RecordScorer = std::function<double(const ImpressionRecord&)>;

// Re-ranks every query by the transformed score (descending, ties broken by
// item_id) and redraws each label from the decay law at its new position
// against the stored Y(1). Output rows carry the transformed score.
// Relabel draws depend only on (seed, query, item), never on the scorer, so
// two scorers that induce the same ranking yield identical labels.
//
// Errors: MissingTruth, ScorerFailure (wrapping the scorer's error with
// query and item context).
SimLog rerank_and_relabel(const SimLog& log, const RecordScorer& scorer,
                          const SimConfig& config);

}  // namespace fairrank

#endif  // FAIRRANK_SIMULATE_H_
