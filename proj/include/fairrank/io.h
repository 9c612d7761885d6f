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

#ifndef FAIRRANK_IO_H_
#define FAIRRANK_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairrank/eodds.h"
#include "fairrank/eopp.h"
#include "fairrank/position_bias.h"
#include "fairrank/types.h"

namespace fairrank {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Writes to a sibling temp file, then renames over `path`. Errors: IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Errors: IoError.
std::string read_file(const std::filesystem::path& path);

// Impression log with header `query_id,item_id,group,score,position,label`
// and an optional trailing `fair_score` column.
struct ImpressionTable {
  std::vector<ImpressionRecord> records;
  std::optional<std::vector<double>> fair_score;
};

// Errors: ParseError (bad header, field count or number; message carries the
// line), IoError.
ImpressionTable parse_impressions_csv(std::string_view text);
ImpressionTable read_impressions_csv(const std::filesystem::path& path);
std::string impressions_csv(const ImpressionTable& table);
void write_impressions_csv(const std::filesystem::path& path, const ImpressionTable& table);

// Ground truth with header `item_id,group,y1,relevance`. On read the rows are
// placed by item_id, which must cover 0..n-1 exactly once (SchemaMismatch).
std::vector<SimulatedItem> parse_truth_csv(std::string_view text);
std::vector<SimulatedItem> read_truth_csv(const std::filesystem::path& path);
std::string truth_csv(const std::vector<SimulatedItem>& truth);

// JSON artifacts. Every parser throws SchemaMismatch on a wrong format tag,
// an unsupported version, or missing and malformed fields; ParseError when the
// text is not JSON. Re-exporting an imported artifact reproduces it byte for
// byte.
std::string weights_to_json(const PositionWeights& weights);
PositionWeights weights_from_json(std::string_view text);

std::string eopp_to_json(const EoppModel& model);
EoppModel eopp_from_json(std::string_view text);

// The training report is stored without its wall-clock time so that reruns
// produce identical files.
std::string eodds_to_json(const EoddsModel& model, const EoddsConstraintSpec& spec);
EoddsModel eodds_from_json(std::string_view text, EoddsConstraintSpec* spec = nullptr);

// Reads the format tag of a model artifact: "eopp" or "eodds".
std::string model_kind(std::string_view text);

}  // namespace fairrank

#endif  // FAIRRANK_IO_H_
