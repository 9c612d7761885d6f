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

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include "doctest.h"
#include "fairrank/rng.h"
#include "fairrank/simulate.h"
#include "json.hpp"
#include "support/error_check.h"

namespace fairrank {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "fairrank_io_test";
  fs::create_directories(d);
  return d;
}

struct Fixture {
  SimConfig config;
  SimLog log;
  ValidatedDataset data;
  PositionWeights weights = PositionWeights::log_decay(10);

  Fixture()
      : config(make_config()),
        log(generate_queries(generate_population(config), config)),
        data(validate_dataset(log.records, {1, {0, 1}})) {}

  static SimConfig make_config() {
    SimConfig c;
    c.population_size = 2000;
    c.n_queries = 400;
    c.slots = 10;
    return c;
  }
};

TEST_CASE("format_double round-trips") {
  CounterRng rng(1, Stream::kTest, {});
  for (int i = 0; i < 10000; ++i) {
    const double v = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.below(200)) - 100);
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("impression CSV") {
  const Fixture f;
  SUBCASE("round trip without and with fair scores") {
    ImpressionTable t{f.log.records, std::nullopt};
    const std::string text = impressions_csv(t);
    CHECK(text.rfind("query_id,item_id,group,score,position,label\n", 0) == 0);
    const ImpressionTable back = parse_impressions_csv(text);
    CHECK(back.records == f.log.records);
    CHECK(!back.fair_score);
    CHECK(impressions_csv(back) == text);

    std::vector<double> fair(t.records.size());
    for (std::size_t i = 0; i < fair.size(); ++i) fair[i] = std::sqrt(static_cast<double>(i));
    t.fair_score = fair;
    const ImpressionTable back2 = parse_impressions_csv(impressions_csv(t));
    REQUIRE(back2.fair_score);
    CHECK(*back2.fair_score == fair);
  }
  SUBCASE("CRLF and blank lines") {
    const auto t = parse_impressions_csv(
        "query_id,item_id,group,score,position,label\r\n1,2,0,0.5,1,1\r\n\r\n");
    REQUIRE(t.records.size() == 1);
    CHECK(t.records[0].score == 0.5);
  }
  SUBCASE("errors") {
    CHECK_ERROR_CODE(parse_impressions_csv("a,b\n1,2\n"), ErrorCode::kParseError);
    CHECK_ERROR_CODE(parse_impressions_csv(""), ErrorCode::kParseError);
    CHECK_ERROR_CODE(
        parse_impressions_csv("query_id,item_id,group,score,position,label\n1,2,0,0.5,1\n"),
        ErrorCode::kParseError);
    CHECK_ERROR_CODE(
        parse_impressions_csv("query_id,item_id,group,score,position,label\n1,2,0,abc,1,0\n"),
        ErrorCode::kParseError);
    CHECK_ERROR_CODE(read_impressions_csv(scratch_dir() / "missing.csv"), ErrorCode::kIoError);
  }
}

TEST_CASE("truth CSV") {
  const Fixture f;
  const std::string text = truth_csv(f.log.truth);
  CHECK(text.rfind("item_id,group,y1,relevance\n", 0) == 0);
  CHECK(parse_truth_csv(text) == f.log.truth);
  CHECK_ERROR_CODE(parse_truth_csv("item_id,group,y1,relevance\n1,0,1,0.5\n"),
                   ErrorCode::kSchemaMismatch);
  CHECK_ERROR_CODE(parse_truth_csv("item_id,group,y1,relevance\n0,0,2,0.5\n"),
                   ErrorCode::kParseError);
}

TEST_CASE("atomic writes") {
  const fs::path p = scratch_dir() / "atomic.txt";
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  CHECK(read_file(p) == "second");
  CHECK(!fs::exists(fs::path(p.string() + ".tmp")));
  CHECK_ERROR_CODE(write_file_atomic(scratch_dir() / "no" / "such" / "dir.txt", "x"),
                   ErrorCode::kIoError);
}

TEST_CASE("weights JSON") {
  const PositionWeights w({1.0, 0.7, 0.5, 0.5}, 3, WeightSource::kObservational,
                          {50, 1e-6, 20.0, false});
  const std::string text = weights_to_json(w);
  const auto j = nlohmann::json::parse(text);
  CHECK(j.at("T") == 3);
  CHECK(j.at("source") == "observational");
  CHECK(j.at("weights").size() == 4);
  const PositionWeights back = weights_from_json(text);
  CHECK(back == w);
  CHECK(back.provenance().density_bins == 50);
  CHECK(weights_to_json(back) == text);
  CHECK_ERROR_CODE(weights_from_json("{"), ErrorCode::kParseError);
  CHECK_ERROR_CODE(weights_from_json(R"({"format":"fairrank.weights","version":1})"),
                   ErrorCode::kSchemaMismatch);
}

TEST_CASE("EOpp model JSON") {
  const Fixture f;
  EoppOptions opt;
  opt.alpha = 0.7;
  const EoppModel m = train_eopp(f.data, f.weights, opt);
  const std::string text = eopp_to_json(m);
  const EoppModel back = eopp_from_json(text);
  CHECK(eopp_to_json(back) == text);
  CHECK(back.alpha == m.alpha);
  for (const auto& [g, cdf] : m.per_group_cdf) {
    CHECK(back.per_group_cdf.at(g) == cdf);
  }
  CHECK(back.pooled_pre_cdf == m.pooled_pre_cdf);
  CHECK(back.pooled_post_cdf == m.pooled_post_cdf);
  CHECK(back.position_weights == m.position_weights);
  for (const auto& r : f.log.records) {
    CHECK(score_eopp(back, r.score, r.group) == score_eopp(m, r.score, r.group));
  }
  CHECK(model_kind(text) == "eopp");

  auto j = nlohmann::ordered_json::parse(text);
  SUBCASE("missing group CDF") {
    j["per_group_cdf"].erase(1);
    CHECK_ERROR_CODE(eopp_from_json(j.dump()), ErrorCode::kSchemaMismatch);
  }
  SUBCASE("version mismatch") {
    j["version"] = 2;
    CHECK_ERROR_CODE(eopp_from_json(j.dump()), ErrorCode::kSchemaMismatch);
  }
  SUBCASE("wrong format") {
    j["format"] = "fairrank.eodds";
    CHECK_ERROR_CODE(eopp_from_json(j.dump()), ErrorCode::kSchemaMismatch);
  }
  SUBCASE("broken CDF") {
    j["pooled_pre_cdf"]["cum_mass"][0] = 2.0;
    CHECK_ERROR_CODE(eopp_from_json(j.dump()), ErrorCode::kSchemaMismatch);
  }
}

TEST_CASE("discretized EOpp model JSON") {
  const Fixture f;
  EoppOptions opt;
  opt.discretize_step = 1e-3;
  const EoppModel m = train_eopp(f.data, f.weights, opt);
  const std::string text = eopp_to_json(m);
  CHECK(eopp_to_json(eopp_from_json(text)) == text);
  CHECK(eopp_from_json(text).per_group_cdf.at(0).interpolation() ==
        WeightedEmpiricalCdf::Interpolation::kLinear);
}

TEST_CASE("EOdds model JSON") {
  const Fixture f;
  EoddsConstraintSpec spec;
  spec.mode = EoddsMode::kDifferential;
  spec.epsilon1 = 0.1;
  EoddsOptions opt;
  opt.seed = 11;
  opt.alpha = 0.8;
  const EoddsModel m = train_eodds(f.data, f.weights, ScorePartition::equal_width(12), spec, opt);
  const std::string text = eodds_to_json(m, spec);
  EoddsConstraintSpec spec_back;
  const EoddsModel back = eodds_from_json(text, &spec_back);
  CHECK(eodds_to_json(back, spec_back) == text);
  CHECK(std::isinf(spec_back.epsilon0));
  CHECK(spec_back.epsilon1 == 0.1);
  CHECK(spec_back.mode == EoddsMode::kDifferential);
  CHECK(back.transition == m.transition);
  CHECK(back.partition.cut_points() == m.partition.cut_points());
  CHECK(back.seed == 11);
  for (const auto& r : f.log.records) CHECK(eodds_fair_score(back, r) == eodds_fair_score(m, r));

  const auto j = nlohmann::json::parse(text);
  CHECK(j.at("seed_policy").at("rng") == kRngName);
  CHECK(j.at("transition").at(0).size() == 144);
  CHECK(model_kind(text) == "eodds");

  auto bad = nlohmann::ordered_json::parse(text);
  bad["transition"][0][0] = 0.5;
  CHECK_ERROR_CODE(eodds_from_json(bad.dump()), ErrorCode::kSchemaMismatch);
  auto short_rows = nlohmann::ordered_json::parse(text);
  short_rows["transition"][1].erase(0);
  CHECK_ERROR_CODE(eodds_from_json(short_rows.dump()), ErrorCode::kSchemaMismatch);
}

}  // namespace
}  // namespace fairrank
