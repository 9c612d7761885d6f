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

#ifndef FAIRRANK_LP_H_
#define FAIRRANK_LP_H_

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace fairrank {

// Row-major dense matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data).subspan(r * cols, cols);
  }

  // Appends a zero row and returns its index.
  std::size_t add_row();
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// minimize objective . x
// subject to  eq_matrix x = eq_rhs,  ineq_matrix x <= ineq_rhs,  lower <= x <= upper
struct LpProblem {
  std::vector<double> objective;
  DenseMatrix eq_matrix;
  std::vector<double> eq_rhs;
  DenseMatrix ineq_matrix;
  std::vector<double> ineq_rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  // Empty problem over n variables with bounds [0, +inf).
  explicit LpProblem(std::size_t num_vars = 0);

  std::size_t num_vars() const { return objective.size(); }
  std::size_t add_eq_row(double rhs);
  std::size_t add_ineq_row(double rhs);

  // Throws MalformedProblem on inconsistent sizes, lower > upper,
  // non-finite coefficients, or NaN bounds.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  std::vector<double> x;
  double objective_value = 0.0;
  std::size_t iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-10;
  double optimality_tol = 1e-11;
  std::size_t max_iterations = 1'000'000;
  // Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_streak = 50;
  // Pivots between rebuilds of the basis inverse from the original columns.
  std::size_t refactor_interval = 100;
};

// Two-phase bounded-variable revised simplex: sparse columns, an explicit
// dense basis inverse rebuilt every refactor_interval pivots, Dantzig pricing
// with a Harris ratio test, switching to Bland's rule after a streak of
// degenerate pivots.
// Deterministic: no randomization anywhere.
LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

struct FeasibilityReport {
  double max_eq_residual = 0.0;      // max |A x - b|
  double max_ineq_violation = 0.0;   // max (G x - h)+
  double max_bound_violation = 0.0;  // max distance outside [lower, upper]

  double worst() const;
  bool feasible(double tol) const { return worst() <= tol; }
};

// Throws DimensionMismatch when x has the wrong length.
FeasibilityReport check_solution(const LpProblem& problem,
                                 std::span<const double> x);

// Plain-text listing of the problem for cross-checking with external solvers.
void write_listing(std::ostream& out, const LpProblem& problem);

}  // namespace fairrank

#endif  // FAIRRANK_LP_H_
