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

#ifndef FAIRRANK_DATASET_H_
#define FAIRRANK_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "fairrank/types.h"

namespace fairrank {

struct DatasetSchema {
  // Labels must lie in {0, ..., max_label}; 1 means binary responses.
  std::int32_t max_label = 1;
  // Declared groups. Empty means "whatever appears in the data".
  std::vector<GroupId> groups;
};

// Impression log that passed validation. Records are ordered by
// (query_id, position), so every query occupies a contiguous run.
class ValidatedDataset {
 public:
  const std::vector<ImpressionRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  std::size_t num_queries() const { return query_offsets_.size() - 1; }
  std::span<const ImpressionRecord> query(std::size_t q) const {
    return std::span<const ImpressionRecord>(records_).subspan(
        query_offsets_[q], query_offsets_[q + 1] - query_offsets_[q]);
  }

  const std::vector<GroupId>& groups() const { return groups_; }
  std::int32_t max_label() const { return max_label_; }
  std::int32_t max_position() const { return max_position_; }

  std::size_t group_count(GroupId g) const;
  std::size_t label_count(GroupId g, std::int32_t label) const;
  std::size_t position_count(std::int32_t position) const;

  friend ValidatedDataset validate_dataset(std::vector<ImpressionRecord>,
                                           const DatasetSchema&);

 private:
  std::vector<ImpressionRecord> records_;
  std::vector<std::size_t> query_offsets_;
  std::vector<GroupId> groups_;
  std::map<GroupId, std::vector<std::size_t>> label_counts_;
  std::vector<std::size_t> position_counts_;
  std::int32_t max_label_ = 1;
  std::int32_t max_position_ = 0;
};

// Checks the log invariants and indexes it by query.
//
// Errors: EmptyInput, InvalidPosition (position < 1), DuplicatePosition,
// PositionGap (positions in a query are not 1..J), LabelOutOfRange,
// UnknownGroup (group not declared), MissingGroup (declared group absent).
ValidatedDataset validate_dataset(std::vector<ImpressionRecord> records,
                                  const DatasetSchema& schema = {});

}  // namespace fairrank

#endif  // FAIRRANK_DATASET_H_
