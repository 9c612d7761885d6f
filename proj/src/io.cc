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

#include "fairrank/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "fairrank/error.h"
#include "json.hpp"

namespace fairrank {
namespace {

using nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void schema_fail(const std::string& what) {
  throw Error(ErrorCode::kSchemaMismatch, what);
}

template <typename T>
T parse_number(std::string_view field, std::size_t line) {
  T v{};
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    parse_fail(line, "bad number '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// Calls fn(fields, line_number) for every data line after checking the
// header against `expected` plus any `optional` trailing columns.
template <typename Fn>
std::size_t for_each_row(std::string_view text, const std::vector<std::string>& expected,
                         const std::vector<std::string>& optional, Fn fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (columns == 0) {
      std::vector<std::string> want = expected;
      std::size_t n = expected.size();
      for (const std::string& extra : optional) {
        if (fields.size() > n && fields[n] == extra) ++n;
      }
      if (fields.size() != n) parse_fail(line_no, "unexpected header");
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (fields[i] != expected[i]) parse_fail(line_no, "unexpected header");
      }
      columns = n;
      continue;
    }
    if (fields.size() != columns) {
      parse_fail(line_no, "expected " + std::to_string(columns) + " fields, got " +
                              std::to_string(fields.size()));
    }
    fn(fields, line_no);
  }
  if (columns == 0) parse_fail(line_no, "missing header");
  return columns;
}

ordered_json cdf_to_json(const WeightedEmpiricalCdf& cdf) {
  ordered_json j;
  j["interpolation"] =
      cdf.interpolation() == WeightedEmpiricalCdf::Interpolation::kStep ? "step" : "linear";
  j["total_weight"] = cdf.total_weight();
  j["knots"] = cdf.knots();
  j["cum_mass"] = cdf.cum_mass();
  return j;
}

template <typename T>
T field(const ordered_json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema_fail(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    schema_fail(std::string("malformed field '") + key + "'");
  }
}

WeightedEmpiricalCdf cdf_from_json(const ordered_json& j) {
  const auto interp = field<std::string>(j, "interpolation");
  if (interp != "step" && interp != "linear") schema_fail("unknown interpolation " + interp);
  try {
    return WeightedEmpiricalCdf(field<std::vector<double>>(j, "knots"),
                                field<std::vector<double>>(j, "cum_mass"),
                                field<double>(j, "total_weight"),
                                interp == "step" ? WeightedEmpiricalCdf::Interpolation::kStep
                                                 : WeightedEmpiricalCdf::Interpolation::kLinear);
  } catch (const Error& e) {
    schema_fail(std::string("invalid CDF: ") + e.what());
  }
}

ordered_json weights_json(const PositionWeights& w) {
  ordered_json j;
  j["format"] = "fairrank.weights";
  j["version"] = kFormatVersion;
  j["weights"] = w.weights();
  j["T"] = w.truncation();
  j["source"] = to_string(w.source());
  const EstimatorProvenance& p = w.provenance();
  j["provenance"] = {{"density_bins", p.density_bins},
                     {"smoothing_epsilon", p.smoothing_epsilon},
                     {"ratio_cap", p.ratio_cap},
                     {"slot_randomized", p.slot_randomized}};
  return j;
}

ordered_json parse_json(std::string_view text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

void check_header(const ordered_json& j, const std::string& format) {
  if (field<std::string>(j, "format") != format) {
    schema_fail("expected format " + format);
  }
  const int version = field<int>(j, "version");
  if (version != kFormatVersion) {
    schema_fail("unsupported " + format + " version " + std::to_string(version));
  }
}

PositionWeights weights_from(const ordered_json& j) {
  check_header(j, "fairrank.weights");
  EstimatorProvenance p;
  if (j.contains("provenance")) {
    const auto& pj = j.at("provenance");
    p.density_bins = field<std::int32_t>(pj, "density_bins");
    p.smoothing_epsilon = field<double>(pj, "smoothing_epsilon");
    p.ratio_cap = field<double>(pj, "ratio_cap");
    p.slot_randomized = field<bool>(pj, "slot_randomized");
  }
  WeightSource source;
  try {
    source = weight_source_from_string(field<std::string>(j, "source"));
  } catch (const Error& e) {
    schema_fail(e.what());
  }
  try {
    return PositionWeights(field<std::vector<double>>(j, "weights"), field<std::int32_t>(j, "T"),
                           source, p);
  } catch (const Error& e) {
    schema_fail(std::string("invalid weights: ") + e.what());
  }
}

// JSON has no infinity; null stands for an unconstrained label.
ordered_json epsilon_json(double eps) {
  return std::isinf(eps) ? ordered_json(nullptr) : ordered_json(eps);
}

double epsilon_from(const ordered_json& j, const char* key) {
  if (!j.contains(key)) schema_fail(std::string("missing field '") + key + "'");
  if (j.at(key).is_null()) return std::numeric_limits<double>::infinity();
  return field<double>(j, key);
}

LpStatus lp_status_from_string(const std::string& s) {
  for (LpStatus st : {LpStatus::kOptimal, LpStatus::kInfeasible, LpStatus::kUnbounded,
                      LpStatus::kIterationLimit}) {
    if (s == to_string(st)) return st;
  }
  schema_fail("unknown LP status " + s);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot open " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIoError, "cannot rename onto " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ImpressionTable parse_impressions_csv(std::string_view text) {
  ImpressionTable t;
  std::vector<double> fair;
  const std::size_t columns = for_each_row(
      text, {"query_id", "item_id", "group", "score", "position", "label"}, {"fair_score"},
      [&](const std::vector<std::string_view>& f, std::size_t line) {
        ImpressionRecord r;
        r.query_id = parse_number<std::uint64_t>(f[0], line);
        r.item_id = parse_number<std::uint64_t>(f[1], line);
        r.group = parse_number<GroupId>(f[2], line);
        r.score = parse_number<double>(f[3], line);
        r.position = parse_number<std::int32_t>(f[4], line);
        r.label = parse_number<std::int32_t>(f[5], line);
        t.records.push_back(r);
        if (f.size() == 7) fair.push_back(parse_number<double>(f[6], line));
      });
  if (columns == 7) t.fair_score = std::move(fair);
  return t;
}

ImpressionTable read_impressions_csv(const std::filesystem::path& path) {
  return parse_impressions_csv(read_file(path));
}

std::string impressions_csv(const ImpressionTable& table) {
  if (table.fair_score && table.fair_score->size() != table.records.size()) {
    throw Error(ErrorCode::kInconsistentDimensions, "fair_score column length mismatch");
  }
  std::string out = "query_id,item_id,group,score,position,label";
  out += table.fair_score ? ",fair_score\n" : "\n";
  for (std::size_t i = 0; i < table.records.size(); ++i) {
    const ImpressionRecord& r = table.records[i];
    out += std::to_string(r.query_id);
    out += ',';
    out += std::to_string(r.item_id);
    out += ',';
    out += std::to_string(r.group);
    out += ',';
    out += format_double(r.score);
    out += ',';
    out += std::to_string(r.position);
    out += ',';
    out += std::to_string(r.label);
    if (table.fair_score) {
      out += ',';
      out += format_double((*table.fair_score)[i]);
    }
    out += '\n';
  }
  return out;
}

void write_impressions_csv(const std::filesystem::path& path, const ImpressionTable& table) {
  write_file_atomic(path, impressions_csv(table));
}

std::vector<SimulatedItem> parse_truth_csv(std::string_view text) {
  std::vector<SimulatedItem> rows;
  for_each_row(text, {"item_id", "group", "y1", "relevance"}, {},
               [&](const std::vector<std::string_view>& f, std::size_t line) {
                 SimulatedItem it;
                 it.item_id = parse_number<std::uint64_t>(f[0], line);
                 it.group = parse_number<GroupId>(f[1], line);
                 it.counterfactual_label = parse_number<std::int32_t>(f[2], line);
                 it.relevance = parse_number<double>(f[3], line);
                 if (it.counterfactual_label != 0 && it.counterfactual_label != 1) {
                   parse_fail(line, "y1 must be 0 or 1");
                 }
                 rows.push_back(it);
               });
  std::vector<SimulatedItem> out(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (const SimulatedItem& it : rows) {
    if (it.item_id >= rows.size() || seen[it.item_id]) {
      schema_fail("truth item ids must cover 0.." + std::to_string(rows.size() - 1) +
                  " exactly once");
    }
    seen[it.item_id] = true;
    out[it.item_id] = it;
  }
  return out;
}

std::vector<SimulatedItem> read_truth_csv(const std::filesystem::path& path) {
  return parse_truth_csv(read_file(path));
}

std::string truth_csv(const std::vector<SimulatedItem>& truth) {
  std::string out = "item_id,group,y1,relevance\n";
  for (const SimulatedItem& it : truth) {
    out += std::to_string(it.item_id);
    out += ',';
    out += std::to_string(it.group);
    out += ',';
    out += std::to_string(it.counterfactual_label);
    out += ',';
    out += format_double(it.relevance);
    out += '\n';
  }
  return out;
}

std::string weights_to_json(const PositionWeights& weights) {
  return weights_json(weights).dump(2) + "\n";
}

PositionWeights weights_from_json(std::string_view text) {
  return weights_from(parse_json(text));
}

std::string eopp_to_json(const EoppModel& model) {
  ordered_json j;
  j["format"] = "fairrank.eopp";
  j["version"] = kFormatVersion;
  j["alpha"] = model.alpha;
  j["rescale"] = model.rescale;
  std::vector<GroupId> ids;
  ordered_json per_group = ordered_json::array();
  for (const auto& [g, cdf] : model.per_group_cdf) {
    ids.push_back(g);
    ordered_json entry = cdf_to_json(cdf);
    entry["group"] = g;
    per_group.push_back(entry);
  }
  j["group_ids"] = ids;
  j["per_group_cdf"] = per_group;
  j["pooled_pre_cdf"] = cdf_to_json(model.pooled_pre_cdf);
  j["pooled_post_cdf"] = cdf_to_json(model.pooled_post_cdf);
  j["position_weights"] = weights_json(model.position_weights);
  return j.dump(2) + "\n";
}

EoppModel eopp_from_json(std::string_view text) {
  const ordered_json j = parse_json(text);
  check_header(j, "fairrank.eopp");
  EoppModel m;
  m.alpha = field<double>(j, "alpha");
  if (!(m.alpha >= 0.0 && m.alpha <= 1.0)) schema_fail("alpha outside [0, 1]");
  m.rescale = field<bool>(j, "rescale");
  const auto ids = field<std::vector<GroupId>>(j, "group_ids");
  const auto per_group = field<ordered_json>(j, "per_group_cdf");
  if (!per_group.is_array()) schema_fail("per_group_cdf must be an array");
  for (const auto& entry : per_group) {
    const GroupId g = field<GroupId>(entry, "group");
    if (m.per_group_cdf.contains(g)) schema_fail("duplicate CDF for group " + std::to_string(g));
    m.per_group_cdf.emplace(g, cdf_from_json(entry));
  }
  for (GroupId g : ids) {
    if (!m.per_group_cdf.contains(g)) schema_fail("missing CDF for group " + std::to_string(g));
  }
  if (m.per_group_cdf.size() != ids.size()) schema_fail("CDF for an undeclared group");
  m.pooled_pre_cdf = cdf_from_json(field<ordered_json>(j, "pooled_pre_cdf"));
  m.pooled_post_cdf = cdf_from_json(field<ordered_json>(j, "pooled_post_cdf"));
  m.position_weights = weights_from(field<ordered_json>(j, "position_weights"));
  return m;
}

std::string eodds_to_json(const EoddsModel& model, const EoddsConstraintSpec& spec) {
  ordered_json j;
  j["format"] = "fairrank.eodds";
  j["version"] = kFormatVersion;
  j["cut_points"] = model.partition.cut_points();
  j["group_ids"] = model.groups;
  ordered_json rows = ordered_json::array();
  for (const auto& group : model.transition) {
    std::vector<double> flat;
    for (const auto& row : group) flat.insert(flat.end(), row.begin(), row.end());
    rows.push_back(flat);
  }
  j["transition"] = rows;
  j["within_bin_law"] = "uniform";
  j["seed_policy"] = {{"rng", kRngName},
                      {"stream", "eodds_scoring"},
                      {"key", {"query_id", "item_id"}},
                      {"seed", model.seed}};
  j["score_map"] = to_string(model.score_map);
  j["alpha"] = model.alpha;
  j["rescale"] = model.rescale;
  j["pooled_pre_cdf"] = cdf_to_json(model.pooled_pre_cdf);
  j["post_bin_mass"] = model.post_bin_mass;
  j["constraints"] = {{"mode", to_string(spec.mode)},
                      {"outcomes", spec.outcomes},
                      {"epsilon0", epsilon_json(spec.epsilon0)},
                      {"epsilon1", epsilon_json(spec.epsilon1)}};
  const EoddsTrainingReport& r = model.report;
  j["training_report"] = {{"lp_status", to_string(r.lp_status)},
                          {"lp_iterations", r.lp_iterations},
                          {"lp_objective", r.lp_objective},
                          {"max_constraint_residual", r.max_constraint_residual},
                          {"max_row_sum_error", r.max_row_sum_error},
                          {"floored_negatives", r.floored_negatives}};
  return j.dump(2) + "\n";
}

EoddsModel eodds_from_json(std::string_view text, EoddsConstraintSpec* spec) {
  const ordered_json j = parse_json(text);
  check_header(j, "fairrank.eodds");
  EoddsModel m;
  try {
    m.partition = ScorePartition(field<std::vector<double>>(j, "cut_points"));
  } catch (const Error& e) {
    schema_fail(std::string("invalid cut points: ") + e.what());
  }
  const std::size_t bins = m.partition.size();
  m.groups = field<std::vector<GroupId>>(j, "group_ids");
  const auto rows = field<std::vector<std::vector<double>>>(j, "transition");
  if (rows.size() != m.groups.size()) schema_fail("one transition matrix per group expected");
  for (const auto& flat : rows) {
    if (flat.size() != bins * bins) schema_fail("transition matrix is not K x K");
    std::vector<std::vector<double>> group(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      group[k].assign(flat.begin() + static_cast<std::ptrdiff_t>(k * bins),
                      flat.begin() + static_cast<std::ptrdiff_t>((k + 1) * bins));
      double sum = 0.0;
      for (double v : group[k]) {
        if (!(v >= 0.0)) schema_fail("negative transition probability");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) schema_fail("transition row does not sum to 1");
    }
    m.transition.push_back(std::move(group));
  }
  if (field<std::string>(j, "within_bin_law") != "uniform") {
    schema_fail("only the uniform within-bin law is supported");
  }
  const auto policy = field<ordered_json>(j, "seed_policy");
  if (field<std::string>(policy, "rng") != kRngName) schema_fail("unknown RNG");
  m.seed = field<std::uint64_t>(policy, "seed");
  try {
    m.score_map = score_map_from_string(field<std::string>(j, "score_map"));
  } catch (const Error& e) {
    schema_fail(e.what());
  }
  m.alpha = field<double>(j, "alpha");
  if (!(m.alpha >= 0.0 && m.alpha <= 1.0)) schema_fail("alpha outside [0, 1]");
  m.rescale = field<bool>(j, "rescale");
  m.pooled_pre_cdf = cdf_from_json(field<ordered_json>(j, "pooled_pre_cdf"));
  m.post_bin_mass = field<std::vector<double>>(j, "post_bin_mass");
  if (m.post_bin_mass.size() != bins) schema_fail("post_bin_mass length differs from K");

  const auto c = field<ordered_json>(j, "constraints");
  EoddsConstraintSpec s;
  try {
    s.mode = eodds_mode_from_string(field<std::string>(c, "mode"));
  } catch (const Error& e) {
    schema_fail(e.what());
  }
  s.outcomes = field<std::int32_t>(c, "outcomes");
  s.epsilon0 = epsilon_from(c, "epsilon0");
  s.epsilon1 = epsilon_from(c, "epsilon1");
  if (spec != nullptr) *spec = s;

  const auto r = field<ordered_json>(j, "training_report");
  m.report.lp_status = lp_status_from_string(field<std::string>(r, "lp_status"));
  m.report.lp_iterations = field<std::size_t>(r, "lp_iterations");
  m.report.lp_objective = field<double>(r, "lp_objective");
  m.report.max_constraint_residual = field<double>(r, "max_constraint_residual");
  m.report.max_row_sum_error = field<double>(r, "max_row_sum_error");
  m.report.floored_negatives = field<std::size_t>(r, "floored_negatives");
  return m;
}

std::string model_kind(std::string_view text) {
  const ordered_json j = parse_json(text);
  const auto format = field<std::string>(j, "format");
  if (format == "fairrank.eopp") return "eopp";
  if (format == "fairrank.eodds") return "eodds";
  schema_fail("not a model artifact: " + format);
}

}  // namespace fairrank
