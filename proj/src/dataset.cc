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

#include "fairrank/dataset.h"

#include <algorithm>
#include <string>

#include "fairrank/error.h"

namespace fairrank {

ScorePartition::ScorePartition(std::vector<double> cut_points)
    : cut_points_(std::move(cut_points)) {
  if (cut_points_.size() < 2 || cut_points_.front() != 0.0 ||
      cut_points_.back() != 1.0) {
    throw Error(ErrorCode::kInconsistentDimensions,
                "partition must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < cut_points_.size(); ++i) {
    if (!(cut_points_[i] > cut_points_[i - 1])) {
      throw Error(ErrorCode::kInconsistentDimensions,
                  "partition cut points must be strictly increasing");
    }
  }
  const double width = 1.0 / static_cast<double>(size());
  uniform_ = true;
  for (std::size_t i = 0; i < cut_points_.size(); ++i) {
    if (cut_points_[i] != static_cast<double>(i) * width &&
        i + 1 != cut_points_.size()) {
      uniform_ = false;
      break;
    }
  }
}

ScorePartition ScorePartition::equal_width(std::size_t bins) {
  if (bins == 0) {
    throw Error(ErrorCode::kInconsistentDimensions, "need at least one bin");
  }
  std::vector<double> cuts(bins + 1);
  const double width = 1.0 / static_cast<double>(bins);
  for (std::size_t i = 0; i < bins; ++i) cuts[i] = static_cast<double>(i) * width;
  cuts[bins] = 1.0;
  return ScorePartition(std::move(cuts));
}

std::size_t ScorePartition::bin_of(double score) const {
  if (!(score >= 0.0 && score < 1.0)) {
    throw Error(ErrorCode::kScoreOutOfUnitInterval,
                "score " + std::to_string(score) + " not in [0, 1)");
  }
  if (uniform_) {
    // Fast path; fix up the rare case where k*width rounds across a cut.
    auto k = static_cast<std::size_t>(score * static_cast<double>(size()));
    k = std::min(k, size() - 1);
    while (k > 0 && score < cut_points_[k]) --k;
    while (k + 1 < size() && score >= cut_points_[k + 1]) ++k;
    return k;
  }
  auto it = std::upper_bound(cut_points_.begin(), cut_points_.end(), score);
  return static_cast<std::size_t>(it - cut_points_.begin()) - 1;
}

std::size_t ValidatedDataset::group_count(GroupId g) const {
  auto it = label_counts_.find(g);
  if (it == label_counts_.end()) return 0;
  std::size_t total = 0;
  for (std::size_t c : it->second) total += c;
  return total;
}

std::size_t ValidatedDataset::label_count(GroupId g, std::int32_t label) const {
  auto it = label_counts_.find(g);
  if (it == label_counts_.end() || label < 0 || label > max_label_) return 0;
  return it->second[static_cast<std::size_t>(label)];
}

std::size_t ValidatedDataset::position_count(std::int32_t position) const {
  if (position < 1 || position > max_position_) return 0;
  return position_counts_[static_cast<std::size_t>(position)];
}

ValidatedDataset validate_dataset(std::vector<ImpressionRecord> records,
                                  const DatasetSchema& schema) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyInput, "impression log has no rows");
  }
  if (schema.max_label < 1) {
    throw Error(ErrorCode::kInvalidConfig, "max_label must be >= 1");
  }
  auto by_query_position = [](const ImpressionRecord& a,
                              const ImpressionRecord& b) {
    if (a.query_id != b.query_id) return a.query_id < b.query_id;
    return a.position < b.position;
  };
  if (!std::is_sorted(records.begin(), records.end(), by_query_position)) {
    std::stable_sort(records.begin(), records.end(), by_query_position);
  }

  ValidatedDataset ds;
  ds.max_label_ = schema.max_label;
  const std::size_t num_labels = static_cast<std::size_t>(schema.max_label) + 1;
  for (GroupId g : schema.groups) ds.label_counts_[g].assign(num_labels, 0);

  ds.query_offsets_.push_back(0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ImpressionRecord& r = records[i];
    auto where = [&r] {
      return " (query " + std::to_string(r.query_id) + ", item " +
             std::to_string(r.item_id) + ")";
    };
    if (r.position < 1) {
      throw Error(ErrorCode::kInvalidPosition,
                  "position " + std::to_string(r.position) + where());
    }
    const bool new_query = i == 0 || records[i - 1].query_id != r.query_id;
    if (new_query) {
      if (i != 0) ds.query_offsets_.push_back(i);
      if (r.position != 1) {
        throw Error(ErrorCode::kPositionGap,
                    "query does not start at position 1" + where());
      }
    } else {
      const std::int32_t prev = records[i - 1].position;
      if (prev == r.position) {
        throw Error(ErrorCode::kDuplicatePosition,
                    "position " + std::to_string(r.position) + where());
      }
      if (r.position != prev + 1) {
        throw Error(ErrorCode::kPositionGap,
                    "position " + std::to_string(r.position) + where());
      }
    }
    if (r.label < 0 || r.label > schema.max_label) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "label " + std::to_string(r.label) + where());
    }
    auto it = ds.label_counts_.find(r.group);
    if (it == ds.label_counts_.end()) {
      if (!schema.groups.empty()) {
        throw Error(ErrorCode::kUnknownGroup,
                    "group " + std::to_string(r.group) + where());
      }
      it = ds.label_counts_.emplace(r.group, std::vector<std::size_t>(num_labels, 0))
               .first;
    }
    ++it->second[static_cast<std::size_t>(r.label)];
    ds.max_position_ = std::max(ds.max_position_, r.position);
  }
  ds.query_offsets_.push_back(records.size());

  for (const auto& [g, counts] : ds.label_counts_) {
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    if (total == 0) {
      throw Error(ErrorCode::kMissingGroup,
                  "declared group " + std::to_string(g) + " has no rows");
    }
    ds.groups_.push_back(g);
  }

  ds.position_counts_.assign(static_cast<std::size_t>(ds.max_position_) + 1, 0);
  for (const ImpressionRecord& r : records) {
    ++ds.position_counts_[static_cast<std::size_t>(r.position)];
  }
  ds.records_ = std::move(records);
  return ds;
}

}  // namespace fairrank
