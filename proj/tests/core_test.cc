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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fairrank/cdf.h"
#include "fairrank/dataset.h"
#include "fairrank/rng.h"
#include "fairrank/score_map.h"
#include "fairrank/types.h"
#include "support/error_check.h"

namespace fairrank {
namespace {

ImpressionRecord row(std::uint64_t q, std::uint64_t item, GroupId g, double s,
                     std::int32_t pos, std::int32_t label) {
  ImpressionRecord r;
  r.query_id = q;
  r.item_id = item;
  r.group = g;
  r.score = s;
  r.position = pos;
  r.label = label;
  return r;
}

std::vector<ImpressionRecord> two_by_two() {
  return {row(1, 10, 0, 0.9, 1, 1), row(1, 11, 1, 0.2, 2, 0),
          row(2, 12, 1, 0.7, 1, 1), row(2, 13, 1, 0.1, 2, 0)};
}

TEST_CASE("validate_dataset counts groups and labels") {
  const ValidatedDataset d = validate_dataset(two_by_two(), {1, {0, 1}});
  CHECK(d.size() == 4);
  CHECK(d.num_queries() == 2);
  CHECK(d.group_count(0) == 1);
  CHECK(d.group_count(1) == 3);
  CHECK(d.label_count(1, 0) == 2);
  CHECK(d.label_count(1, 1) == 1);
  CHECK(d.max_position() == 2);
  CHECK(d.position_count(1) == 2);
}

TEST_CASE("validate_dataset orders rows by query then position") {
  auto rows = two_by_two();
  std::reverse(rows.begin(), rows.end());
  const ValidatedDataset d = validate_dataset(rows, {});
  REQUIRE(d.query(0).size() == 2);
  CHECK(d.query(0)[0].position == 1);
  CHECK(d.query(0)[1].position == 2);
  CHECK(d.query(1)[0].query_id == 2);
}

TEST_CASE("validate_dataset is idempotent") {
  const ValidatedDataset a = validate_dataset(two_by_two(), {1, {0, 1}});
  const ValidatedDataset b = validate_dataset(a.records(), {1, {0, 1}});
  CHECK(a.records() == b.records());
  for (GroupId g : {0, 1}) {
    CHECK(a.group_count(g) == b.group_count(g));
    for (int y : {0, 1}) CHECK(a.label_count(g, y) == b.label_count(g, y));
  }
}

TEST_CASE("validate_dataset rejects bad logs") {
  CHECK_ERROR_CODE(validate_dataset({}, {}), ErrorCode::kEmptyInput);

  auto dup = two_by_two();
  dup[1].position = 1;
  CHECK_ERROR_CODE(validate_dataset(dup, {}), ErrorCode::kDuplicatePosition);

  auto label = two_by_two();
  label[0].label = 2;
  CHECK_ERROR_CODE(validate_dataset(label, {1, {}}), ErrorCode::kLabelOutOfRange);
  CHECK_NOTHROW(validate_dataset(label, {2, {}}));

  CHECK_ERROR_CODE(validate_dataset(two_by_two(), {1, {0, 1, 2}}),
                   ErrorCode::kMissingGroup);
  CHECK_ERROR_CODE(validate_dataset(two_by_two(), {1, {1}}), ErrorCode::kUnknownGroup);

  auto gap = two_by_two();
  gap[1].position = 3;
  CHECK_ERROR_CODE(validate_dataset(gap, {}), ErrorCode::kPositionGap);

  auto zero = two_by_two();
  zero[0].position = 0;
  CHECK_ERROR_CODE(validate_dataset(zero, {}), ErrorCode::kInvalidPosition);
}

TEST_CASE("inverse_logit values and monotonicity") {
  CHECK(inverse_logit(0.0) == 0.5);
  // 1 - sigma(20) = 2.06e-9.
  CHECK(std::abs(inverse_logit(20.0) - 0.9999999979388464) < 1e-15);
  CHECK(inverse_logit(20.0) < 1.0);
  CHECK(inverse_logit(-800.0) >= 0.0);
  CHECK(inverse_logit(800.0) == 1.0);
  double prev = inverse_logit(-30.0);
  for (double x = -29.9; x <= 30.0; x += 0.1) {
    const double v = inverse_logit(x);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_ERROR_CODE(inverse_logit(NAN), ErrorCode::kNonFiniteInput);
  CHECK_ERROR_CODE(inverse_logit(INFINITY), ErrorCode::kNonFiniteInput);
}

TEST_CASE("logit and inverse_logit compose to the identity on [-30, 30]") {
  // Probability side: exact to 1e-12 across the whole range.
  for (double x = -30.0; x <= 30.0; x += 0.01) {
    const double p = inverse_logit(x);
    CHECK(std::abs(inverse_logit(logit(p)) - p) <= 1e-12);
  }
  // Score side: only while p keeps enough resolution away from 1.
  for (double x = -30.0; x <= 5.0; x += 0.01) {
    CHECK(std::abs(logit(inverse_logit(x)) - x) <= 1e-12);
  }
  CHECK_ERROR_CODE(logit(0.0), ErrorCode::kNonFiniteInput);
  CHECK_ERROR_CODE(logit(1.0), ErrorCode::kNonFiniteInput);
}

TEST_CASE("score maps") {
  CHECK(apply_score_map(ScoreMap::kIdentity, 0.25) == 0.25);
  CHECK_ERROR_CODE(apply_score_map(ScoreMap::kIdentity, 1.0),
                   ErrorCode::kScoreOutOfUnitInterval);
  CHECK_ERROR_CODE(apply_score_map(ScoreMap::kIdentity, -0.1),
                   ErrorCode::kScoreOutOfUnitInterval);
  CHECK(apply_score_map(ScoreMap::kInverseLogit, 100.0) < 1.0);
  CHECK(score_map_from_string(to_string(ScoreMap::kInverseLogit)) ==
        ScoreMap::kInverseLogit);
  CHECK(score_map_from_string("identity") == ScoreMap::kIdentity);
  CHECK_ERROR_CODE(score_map_from_string("probit"), ErrorCode::kSchemaMismatch);
}

TEST_CASE("empirical_cdf examples") {
  const std::vector<double> s3 = {1, 2, 3};
  const auto f = empirical_cdf(s3);
  CHECK(f(2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const std::vector<double> s2 = {1, 2};
  const std::vector<double> w2 = {3, 1};
  CHECK(empirical_cdf(s2, w2)(1.0) == 0.75);

  const std::vector<double> one = {5};
  const std::vector<double> w1 = {0.3};
  const auto g = empirical_cdf(one, w1);
  CHECK(g(4.9) == 0.0);
  CHECK(g(5.0) == 1.0);
  CHECK(g(1e9) == 1.0);
}

TEST_CASE("empirical_cdf merges ties and rejects bad input") {
  const std::vector<double> s = {2, 1, 2, 2};
  const auto f = empirical_cdf(s);
  REQUIRE(f.knots().size() == 2);
  CHECK(f.cum_mass()[0] == 0.25);
  CHECK(f.cum_mass()[1] == 1.0);
  CHECK(f.total_weight() == 4.0);

  const std::vector<double> empty;
  CHECK_ERROR_CODE(empirical_cdf(empty), ErrorCode::kEmptyInput);
  const std::vector<double> w_bad = {1, 0, 1, 1};
  CHECK_ERROR_CODE(empirical_cdf(s, w_bad), ErrorCode::kNonPositiveWeight);
  const std::vector<double> w_short = {1, 1};
  CHECK_ERROR_CODE(empirical_cdf(s, w_short), ErrorCode::kInconsistentDimensions);
  const std::vector<double> nan = {1, NAN};
  CHECK_ERROR_CODE(empirical_cdf(nan), ErrorCode::kNonFiniteInput);
}

TEST_CASE("quantile examples") {
  const std::vector<double> s3 = {1, 2, 3};
  const auto f = empirical_cdf(s3);
  CHECK(quantile(f, 0.5) == 2.0);
  CHECK(quantile(f, 0.0) == 1.0);
  CHECK(quantile(f, 1.0) == 3.0);
  for (int i = 1; i <= 9; ++i) {
    const double u = i / 10.0;
    CHECK(f(quantile(f, u)) >= u);
  }
  CHECK_ERROR_CODE(quantile(f, 1.5), ErrorCode::kOutOfRangeU);
  CHECK_ERROR_CODE(quantile(f, -0.1), ErrorCode::kOutOfRangeU);
}

TEST_CASE("random CDFs: right-continuous, monotone, normalized") {
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    CounterRng rng(trial, Stream::kTest, {1});
    const std::size_t n = 1 + rng.below(300);
    std::vector<double> xs(n);
    std::vector<double> ws(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid so ties are common.
      xs[i] = std::floor(rng.normal(0.0, 3.0) * 4.0) / 4.0;
      ws[i] = 0.1 + rng.uniform() * 5.0;
    }
    const auto f = empirical_cdf(xs, ws);
    CHECK(std::abs(f.cum_mass().back() - 1.0) <= 1e-12);
    CHECK(f(f.knots().front() - 1e-9) == 0.0);
    for (std::size_t k = 0; k < f.knots().size(); ++k) {
      const double t = f.knots()[k];
      CHECK(f(t) == f.cum_mass()[k]);
      if (k > 0) {
        CHECK(f.knots()[k] > f.knots()[k - 1]);
        CHECK(f.cum_mass()[k] >= f.cum_mass()[k - 1]);
        // Just below a knot the CDF still holds the previous level.
        CHECK(f(std::nextafter(t, -INFINITY)) == f.cum_mass()[k - 1]);
      }
      CHECK(quantile(f, f(t)) <= t);
    }
    // Direct definition as oracle.
    double total = 0.0;
    for (double w : ws) total += w;
    for (double t : {-2.0, 0.0, 0.25, 1.7}) {
      double below = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (xs[i] <= t) below += ws[i];
      }
      CHECK(std::abs(f(t) - below / total) <= 1e-12);
    }
    double prev = -INFINITY;
    for (int i = 0; i <= 100; ++i) {
      const double q = quantile(f, i / 100.0);
      CHECK(q >= prev);
      prev = q;
    }
  }
}

TEST_CASE("discretized CDF stays close and monotone") {
  CounterRng rng(3, Stream::kTest, {2});
  std::vector<double> xs(20000);
  for (double& x : xs) x = rng.normal(0.0, 1.0);
  const auto f = empirical_cdf(xs);
  const auto d = f.discretized(1e-3);
  CHECK(d.interpolation() == WeightedEmpiricalCdf::Interpolation::kLinear);
  CHECK(d.knots().size() < f.knots().size());
  double prev = 0.0;
  for (double t = -4.0; t <= 4.0; t += 0.01) {
    CHECK(std::abs(d(t) - f(t)) <= 2e-3);
    CHECK(d(t) >= prev);
    prev = d(t);
  }
}

TEST_CASE("score partition") {
  const auto p = ScorePartition::equal_width(100);
  CHECK(p.size() == 100);
  CHECK(p.bin_of(0.0) == 0);
  CHECK(p.bin_of(0.0099999) == 0);
  CHECK(p.bin_of(0.01) == 1);
  CHECK(p.bin_of(0.5) == 50);
  CHECK(p.bin_of(std::nextafter(1.0, 0.0)) == 99);
  CHECK(p.midpoint(0) == doctest::Approx(0.005));
  // The fast path and the general search agree at every cut point.
  for (std::size_t k = 0; k < p.size(); ++k) {
    CHECK(p.bin_of(p.lower(k)) == k);
    CHECK(p.bin_of(std::nextafter(p.upper(k), 0.0)) == k);
  }
  CHECK_ERROR_CODE(p.bin_of(1.0), ErrorCode::kScoreOutOfUnitInterval);
  CHECK_ERROR_CODE(p.bin_of(-1e-9), ErrorCode::kScoreOutOfUnitInterval);
  CHECK_ERROR_CODE(ScorePartition({0.0, 0.5, 0.5, 1.0}),
                   ErrorCode::kInconsistentDimensions);
  CHECK_ERROR_CODE(ScorePartition({0.1, 1.0}), ErrorCode::kInconsistentDimensions);
  const ScorePartition uneven({0.0, 0.2, 0.9, 1.0});
  CHECK(uneven.bin_of(0.5) == 1);
  CHECK(uneven.bin_of(0.95) == 2);
}

TEST_CASE("counter RNG substreams are reproducible and distinct") {
  CounterRng a(7, Stream::kLabel, {1, 2});
  CounterRng b(7, Stream::kLabel, {1, 2});
  CounterRng c(7, Stream::kLabel, {2, 1});
  CounterRng d(7, Stream::kRelabel, {1, 2});
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  CHECK(x != d.next_u64());

  CounterRng u(1, Stream::kTest, {});
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  std::vector<int> hist(10, 0);
  for (int i = 0; i < n; ++i) {
    const double z = u.normal(0.0, 1.0);
    sum += z;
    sq += z * z;
    ++hist[u.below(10)];
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
  for (int h : hist) CHECK(std::abs(h - n / 10) < 5 * std::sqrt(n * 0.09));
}

}  // namespace
}  // namespace fairrank
