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

#ifndef FAIRRANK_EODDS_H_
#define FAIRRANK_EODDS_H_

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "fairrank/cdf.h"
#include "fairrank/dataset.h"
#include "fairrank/lp.h"
#include "fairrank/position_bias.h"
#include "fairrank/rng.h"
#include "fairrank/score_map.h"
#include "fairrank/types.h"

namespace fairrank {

// Four-way table n(c, y, k, j): group, label, score bin, 1-based position.
// Raw tallies hold integers; position-adjusted tables hold reals.
class BinCounts {
 public:
  BinCounts(std::vector<GroupId> groups, std::int32_t num_labels,
            std::size_t bins, std::int32_t positions);

  double& at(std::size_t group_index, std::int32_t label, std::size_t bin,
             std::int32_t position) {
    return data_[index(group_index, label, bin, position)];
  }
  double at(std::size_t group_index, std::int32_t label, std::size_t bin,
            std::int32_t position) const {
    return data_[index(group_index, label, bin, position)];
  }

  // Throws UnknownGroup.
  std::size_t group_index(GroupId g) const;

  const std::vector<GroupId>& groups() const { return groups_; }
  std::int32_t num_labels() const { return num_labels_; }
  std::size_t bins() const { return bins_; }
  std::int32_t positions() const { return positions_; }
  double total() const;

  // Adjusted negative counts that came out below zero and were floored.
  std::size_t floored_negatives = 0;

 private:
  std::size_t index(std::size_t g, std::int32_t y, std::size_t k,
                    std::int32_t j) const {
    return ((g * static_cast<std::size_t>(num_labels_) +
             static_cast<std::size_t>(y)) * bins_ + k) *
               static_cast<std::size_t>(positions_) +
           static_cast<std::size_t>(j - 1);
  }

  std::vector<GroupId> groups_;
  std::int32_t num_labels_;
  std::size_t bins_;
  std::int32_t positions_;
  std::vector<double> data_;
};

// Errors: ScoreOutOfUnitInterval (identity map with a score outside [0, 1)).
BinCounts tally_counts(const ValidatedDataset& data, const ScorePartition& partition,
                       ScoreMap map = ScoreMap::kIdentity);

// Undo the positive-response decay per position:
//   n'_{c,y,k}^{(j)} = n_{c,y,k}^{(j)} / w_j                  for y >= 1
//   n'_{c,0,k}^{(j)} = sum_y n_{c,y,k}^{(j)} - sum_{y>=1} n'   floored at 0
// Errors: MissingWeightForPosition (rows at a position with no weight).
BinCounts adjust_counts(const BinCounts& counts, const PositionWeights& weights);

struct ConditionalBinProbs {
  std::vector<GroupId> groups;
  std::int32_t num_labels = 2;
  std::size_t bins = 0;
  // probs[g * num_labels + y][k] = P(s in I_k | C = groups[g], Y(1) = y)
  std::vector<std::vector<double>> probs;
  // source_mass[g][k] = P(C = groups[g], s in I_k), the joint bin mass that
  // weights the movement cost.
  std::vector<std::vector<double>> source_mass;

  const std::vector<double>& of(std::size_t g, std::int32_t y) const {
    return probs[g * static_cast<std::size_t>(num_labels) + static_cast<std::size_t>(y)];
  }
};

// Sums over positions and normalizes each (group, label) stratum.
// Errors: EmptyStratum.
ConditionalBinProbs estimate_bin_probs(const BinCounts& adjusted);

enum class EoddsMode { kStrict, kMultiOutcome, kDifferential };

const char* to_string(EoddsMode mode);
EoddsMode eodds_mode_from_string(const std::string& name);

struct EoddsConstraintSpec {
  EoddsMode mode = EoddsMode::kStrict;
  std::int32_t outcomes = 1;  // M: labels run 0..M
  double epsilon0 = std::numeric_limits<double>::infinity();
  double epsilon1 = std::numeric_limits<double>::infinity();

  // Throws InvalidConfig.
  void validate() const;
};

// Index of p_{k, k', c} in the LP variable vector.
inline std::size_t transition_var(std::size_t group_index, std::size_t from,
                                  std::size_t to, std::size_t bins) {
  return (group_index * bins + from) * bins + to;
}

// Transition LP over p_{k,k',c} in [0, 1]:
//   rows sum to one;
//   strict / multi-outcome: for every label y, target bin k' and group c
//     other than the first (reference) group,
//       sum_k p_{k,k',c} pi_{c,y,k} = sum_k p_{k,k',ref} pi_{ref,y,k};
//   differential: for each label with finite epsilon, every ordered group
//     pair (a, b) and every interior right endpoint,
//       Cum_a - e^{eps} Cum_b <= 0 on post-transition cumulative masses;
//   objective: sum_{c,k,k'} source_mass_{c,k} p_{k,k',c} |mid_k - mid_k'|.
// Errors: SingleGroup, InconsistentDimensions, InvalidConfig.
LpProblem build_lp(const ConditionalBinProbs& probs, const ScorePartition& partition,
                   const EoddsConstraintSpec& spec);

struct EoddsTrainingReport {
  LpStatus lp_status = LpStatus::kOptimal;
  std::size_t lp_iterations = 0;
  double lp_objective = 0.0;
  double max_constraint_residual = 0.0;  // on the raw LP solution
  double max_row_sum_error = 0.0;        // after renormalization
  std::size_t floored_negatives = 0;
  double solve_seconds = 0.0;
};

struct EoddsModel {
  ScorePartition partition = ScorePartition::equal_width(1);
  std::vector<GroupId> groups;
  // transition[g][k] is the destination distribution for source bin k.
  std::vector<std::vector<std::vector<double>>> transition;
  ScoreMap score_map = ScoreMap::kInverseLogit;
  // Seed policy: each record draws from CounterRng(seed, kEoddsScoring,
  // {query_id, item_id}).
  std::uint64_t seed = 0;
  // Blend support: pooled raw-score CDF and pooled post-transition bin mass
  // (uniform within bins), so the fair score can be rescaled to raw units.
  double alpha = 1.0;
  bool rescale = true;
  WeightedEmpiricalCdf pooled_pre_cdf;
  std::vector<double> post_bin_mass;
  EoddsTrainingReport report;

  std::size_t group_index(GroupId g) const;
  EoddsModel with_alpha(double new_alpha) const;
  // CDF of the pooled post-transition score at t in [0, 1].
  double post_cdf(double t) const;
};

struct EoddsOptions {
  ScoreMap score_map = ScoreMap::kInverseLogit;
  double alpha = 1.0;
  bool rescale = true;
  std::uint64_t seed = 0;
  LpOptions lp;
};

// Full training pipeline: tally, adjust, normalize, solve, renormalize rows.
// Errors: everything upstream plus Infeasible / Unbounded / IterationLimit.
EoddsModel train_eodds(const ValidatedDataset& data, const PositionWeights& weights,
                       const ScorePartition& partition,
                       const EoddsConstraintSpec& spec,
                       const EoddsOptions& options = {});

// Errors: UnknownGroup, BinOutOfRange.
std::span<const double> transition_distribution(const EoddsModel& model,
                                                GroupId group, std::size_t bin);

// One randomized draw for a score already in [0, 1): pick k' from the source
// bin's transition row, then a uniform point in I_{k'}.
// Errors: UnknownGroup, ScoreOutOfUnitInterval.
double score_eodds(const EoddsModel& model, double unit_score, GroupId group,
                   CounterRng& rng);

// Raw score in, blended fair score out, using the model's seed policy.
double eodds_fair_score(const EoddsModel& model, const ImpressionRecord& record);

// Post-transition bin masses sum_k probs[k] * p_{k,.,c}.
std::vector<double> apply_transition(const EoddsModel& model, GroupId group,
                                     std::span<const double> source_probs);

}  // namespace fairrank

#endif  // FAIRRANK_EODDS_H_
