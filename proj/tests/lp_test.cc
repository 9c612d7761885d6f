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

#include "fairrank/lp.h"

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fairrank/error.h"
#include "fairrank/rng.h"
#include "support/lp_oracle.h"

namespace fairrank {
namespace {

TEST_CASE("one-variable LP") {
  LpProblem p(1);
  p.objective = {-1.0};
  p.add_ineq_row(1.0);
  p.ineq_matrix(0, 0) = 1.0;
  const LpSolution s = solve_lp(p);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.x[0] == doctest::Approx(1.0));
  CHECK(s.objective_value == doctest::Approx(-1.0));
}

TEST_CASE("degenerate face: assert the objective only") {
  LpProblem p(2);
  p.objective = {1.0, 1.0};
  p.add_eq_row(1.0);
  p.eq_matrix(0, 0) = 1.0;
  p.eq_matrix(0, 1) = 1.0;
  const LpSolution s = solve_lp(p);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective_value == doctest::Approx(1.0));
  CHECK(check_solution(p, s.x).feasible(1e-9));
}

TEST_CASE("contradictory equalities are infeasible") {
  LpProblem p(2);
  p.add_eq_row(0.0);
  p.eq_matrix(0, 0) = 1.0;
  p.add_eq_row(1.0);
  p.eq_matrix(1, 0) = 1.0;
  CHECK(solve_lp(p).status == LpStatus::kInfeasible);
}

TEST_CASE("unbounded ray") {
  LpProblem p(2);
  p.objective = {-1.0, 0.0};
  p.add_ineq_row(1.0);
  p.ineq_matrix(0, 0) = 1.0;
  p.ineq_matrix(0, 1) = -1.0;
  CHECK(solve_lp(p).status == LpStatus::kUnbounded);
}

TEST_CASE("free and upper-only variables") {
  // minimize x0 - x1, x0 free with x0 >= -3 via a row, x1 <= 2 with no lower.
  LpProblem p(2);
  p.objective = {1.0, -1.0};
  p.lower = {-kInf, -kInf};
  p.upper = {kInf, 2.0};
  p.add_ineq_row(3.0);
  p.ineq_matrix(0, 0) = -1.0;
  p.add_ineq_row(10.0);
  p.ineq_matrix(1, 1) = -1.0;
  const LpSolution s = solve_lp(p);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.x[0] == doctest::Approx(-3.0));
  CHECK(s.x[1] == doctest::Approx(2.0));
  CHECK(s.objective_value == doctest::Approx(-5.0));
}

TEST_CASE("redundant equality rows are tolerated") {
  LpProblem p(3);
  p.objective = {1.0, 2.0, 3.0};
  for (int k = 0; k < 3; ++k) {
    const std::size_t r = p.add_eq_row(1.0);
    p.eq_matrix(r, 0) = 1.0;
    p.eq_matrix(r, 1) = 1.0;
    p.eq_matrix(r, 2) = 1.0;
  }
  const LpSolution s = solve_lp(p);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective_value == doctest::Approx(1.0));
}

TEST_CASE("malformed problems are rejected") {
  LpProblem p(2);
  p.lower[0] = 1.0;
  p.upper[0] = 0.0;
  CHECK_THROWS_AS(solve_lp(p), Error);
  LpProblem q(1);
  q.objective[0] = std::nan("");
  CHECK_THROWS_AS(solve_lp(q), Error);
}

TEST_CASE("check_solution reports residuals and is pure") {
  LpProblem p(2);
  p.add_eq_row(1.0);
  p.eq_matrix(0, 0) = 1.0;
  p.eq_matrix(0, 1) = 1.0;
  const std::vector<double> good = {0.25, 0.75};
  CHECK(check_solution(p, good).worst() <= 1e-12);
  const std::vector<double> bumped = {0.25 + 1e-3, 0.75};
  const LpProblem before = p;
  const FeasibilityReport rep = check_solution(p, bumped);
  CHECK(rep.max_eq_residual == doctest::Approx(1e-3).epsilon(1e-6));
  CHECK(p.eq_matrix.data == before.eq_matrix.data);
  CHECK(bumped[0] == 0.25 + 1e-3);
  const std::vector<double> wrong = {1.0};
  CHECK_THROWS_AS(check_solution(p, wrong), Error);
}

LpProblem random_small_lp(CounterRng& rng) {
  const std::size_t n = 1 + rng.below(6);
  LpProblem p(n);
  for (std::size_t j = 0; j < n; ++j) {
    p.objective[j] = rng.uniform() * 4.0 - 2.0;
    p.lower[j] = rng.bernoulli(0.3) ? -1.0 - 2.0 * rng.uniform() : 0.0;
    p.upper[j] = p.lower[j] + 0.5 + 3.0 * rng.uniform();
  }
  const std::size_t constraints = rng.below(5);
  const std::size_t eqs = constraints == 0 ? 0 : rng.below(std::min<std::size_t>(constraints, 2) + 1);
  // Anchor equalities at a random interior point so many are feasible.
  std::vector<double> anchor(n);
  for (std::size_t j = 0; j < n; ++j) {
    anchor[j] = p.lower[j] + rng.uniform() * (p.upper[j] - p.lower[j]);
  }
  for (std::size_t r = 0; r < constraints; ++r) {
    std::vector<double> a(n);
    double at_anchor = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = std::round((rng.uniform() * 4.0 - 2.0) * 4.0) / 4.0;
      at_anchor += a[j] * anchor[j];
    }
    if (r < eqs) {
      const std::size_t row = p.add_eq_row(rng.bernoulli(0.85) ? at_anchor : at_anchor + 5.0);
      for (std::size_t j = 0; j < n; ++j) p.eq_matrix(row, j) = a[j];
    } else {
      const std::size_t row = p.add_ineq_row(at_anchor + rng.uniform() - 0.6);
      for (std::size_t j = 0; j < n; ++j) p.ineq_matrix(row, j) = a[j];
    }
  }
  return p;
}

TEST_CASE("random LPs agree with basis enumeration") {
  CounterRng rng(2024, Stream::kTest, {1});
  int optimal = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const LpProblem p = random_small_lp(rng);
    const auto oracle = testing::brute_force_lp_optimum(p);
    const LpSolution s = solve_lp(p);
    CAPTURE(trial);
    if (!oracle) {
      CHECK(s.status == LpStatus::kInfeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(s.status == LpStatus::kOptimal);
    CHECK(std::abs(s.objective_value - *oracle) <= 1e-8);
    CHECK(check_solution(p, s.x).feasible(1e-9));
    ++optimal;
  }
  CHECK(optimal > 100);
  CHECK(infeasible > 0);
}

TEST_CASE("objective never exceeds any sampled feasible point") {
  CounterRng rng(7, Stream::kTest, {2});
  for (int trial = 0; trial < 20; ++trial) {
    // Inequality-only LPs so rejection sampling finds feasible points.
    LpProblem p(3);
    for (std::size_t j = 0; j < 3; ++j) {
      p.objective[j] = rng.uniform() * 2.0 - 1.0;
      p.upper[j] = 1.0;
    }
    for (int r = 0; r < 2; ++r) {
      const std::size_t row = p.add_ineq_row(0.5 + rng.uniform());
      for (std::size_t j = 0; j < 3; ++j) p.ineq_matrix(row, j) = rng.uniform();
    }
    const LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::kOptimal);
    int accepted = 0;
    for (int k = 0; k < 1000; ++k) {
      std::vector<double> x = {rng.uniform(), rng.uniform(), rng.uniform()};
      if (!check_solution(p, x).feasible(0.0)) continue;
      ++accepted;
      double obj = 0.0;
      for (std::size_t j = 0; j < 3; ++j) obj += p.objective[j] * x[j];
      CHECK(s.objective_value <= obj + 1e-12);
    }
    CHECK(accepted > 0);
  }
}

TEST_CASE("solves are deterministic") {
  CounterRng rng(99, Stream::kTest, {3});
  const LpProblem p = random_small_lp(rng);
  const LpSolution a = solve_lp(p);
  const LpSolution b = solve_lp(p);
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("listing names every nonzero") {
  LpProblem p(2);
  p.objective = {1.0, 0.0};
  p.add_eq_row(1.0);
  p.eq_matrix(0, 1) = 2.0;
  std::ostringstream out;
  write_listing(out, p);
  CHECK(out.str().find("eq 1:2 rhs 1") != std::string::npos);
}

}  // namespace
}  // namespace fairrank
