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

#ifndef FAIRRANK_TYPES_H_
#define FAIRRANK_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fairrank {

// Level of the protected characteristic. Datasets use small non-negative
// integers; the set of groups is fixed per dataset.
using GroupId = std::int32_t;

// One logged impression: the universal input row of every pipeline stage.
struct ImpressionRecord {
  std::uint64_t query_id = 0;
  std::uint64_t item_id = 0;
  GroupId group = 0;
  double score = 0.0;
  std::int32_t position = 1;  // 1 = top slot
  std::int32_t label = 0;     // observed response at `position`

  friend bool operator==(const ImpressionRecord&,
                         const ImpressionRecord&) = default;
};

// Ground truth the simulator knows but a real log never would.
struct SimulatedItem {
  std::uint64_t item_id = 0;
  GroupId group = 0;
  std::int32_t counterfactual_label = 0;  // response if shown at slot 1
  double relevance = 0.0;

  friend bool operator==(const SimulatedItem&, const SimulatedItem&) = default;
};

// Partition of [0, 1) into intervals [cut_k, cut_{k+1}).
class ScorePartition {
 public:
  // Throws InconsistentDimensions unless cuts run 0 = c0 < c1 < ... < cK = 1.
  explicit ScorePartition(std::vector<double> cut_points);

  static ScorePartition equal_width(std::size_t bins);

  std::size_t size() const { return cut_points_.size() - 1; }
  const std::vector<double>& cut_points() const { return cut_points_; }
  double lower(std::size_t k) const { return cut_points_[k]; }
  double upper(std::size_t k) const { return cut_points_[k + 1]; }
  double midpoint(std::size_t k) const {
    return 0.5 * (cut_points_[k] + cut_points_[k + 1]);
  }

  // Index of the interval containing `score`; throws ScoreOutOfUnitInterval
  // outside [0, 1).
  std::size_t bin_of(double score) const;

 private:
  std::vector<double> cut_points_;
  bool uniform_ = false;
};

}  // namespace fairrank

#endif  // FAIRRANK_TYPES_H_
