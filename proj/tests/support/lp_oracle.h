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

#ifndef FAIRRANK_TESTS_SUPPORT_LP_ORACLE_H_
#define FAIRRANK_TESTS_SUPPORT_LP_ORACLE_H_

// Brute-force LP oracle for tiny problems: enumerate every basis of the
// standard-form system, keep the feasible ones, return the best objective.
// Shares no code with the simplex solver.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "fairrank/lp.h"

namespace fairrank::testing {

// Solves M y = r in place by Gaussian elimination with partial pivoting.
// Returns false when M is numerically singular.
inline bool gauss_solve(std::vector<std::vector<double>> m, std::vector<double> r,
                        std::vector<double>& y) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i) {
      if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
    }
    if (std::abs(m[piv][c]) < 1e-11) return false;
    std::swap(m[piv], m[c]);
    std::swap(r[piv], r[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const double f = m[i][c] / m[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) m[i][k] -= f * m[c][k];
      r[i] -= f * r[c];
    }
  }
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = r[i] / m[i][i];
  return true;
}

// Requires finite lower and upper bounds on every variable. Returns nullopt
// when no basic feasible solution exists.
inline std::optional<double> brute_force_lp_optimum(const LpProblem& p,
                                                    double tol = 1e-9) {
  const std::size_t n = p.num_vars();
  // Standard form over z = [x - lower, ineq slacks, upper slacks] >= 0.
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  const std::size_t m_in = p.ineq_matrix.rows;
  const std::size_t cols = n + m_in + n;
  auto shifted_rhs = [&](std::span<const double> a, double b) {
    for (std::size_t j = 0; j < n; ++j) b -= a[j] * p.lower[j];
    return b;
  };
  for (std::size_t r = 0; r < p.eq_matrix.rows; ++r) {
    std::vector<double> row(cols, 0.0);
    auto a = p.eq_matrix.row(r);
    std::copy(a.begin(), a.end(), row.begin());
    rows.push_back(row);
    rhs.push_back(shifted_rhs(a, p.eq_rhs[r]));
  }
  for (std::size_t r = 0; r < m_in; ++r) {
    std::vector<double> row(cols, 0.0);
    auto a = p.ineq_matrix.row(r);
    std::copy(a.begin(), a.end(), row.begin());
    row[n + r] = 1.0;
    rows.push_back(row);
    rhs.push_back(shifted_rhs(a, p.ineq_rhs[r]));
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(cols, 0.0);
    row[j] = 1.0;
    row[n + m_in + j] = 1.0;
    rows.push_back(row);
    rhs.push_back(p.upper[j] - p.lower[j]);
  }

  // Drop linearly dependent rows (detecting inconsistency) by elimination on
  // a copy of the augmented system.
  {
    std::vector<std::vector<double>> aug = rows;
    for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(rhs[i]);
    std::vector<std::size_t> keep;
    std::vector<bool> used(aug.size(), false);
    std::size_t rank_row = 0;
    std::vector<std::size_t> order(aug.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t c = 0; c < cols && rank_row < aug.size(); ++c) {
      std::size_t piv = aug.size();
      double best = 1e-11;
      for (std::size_t i = rank_row; i < aug.size(); ++i) {
        if (std::abs(aug[i][c]) > best) {
          best = std::abs(aug[i][c]);
          piv = i;
        }
      }
      if (piv == aug.size()) continue;
      std::swap(aug[piv], aug[rank_row]);
      std::swap(order[piv], order[rank_row]);
      for (std::size_t i = rank_row + 1; i < aug.size(); ++i) {
        const double f = aug[i][c] / aug[rank_row][c];
        for (std::size_t k = c; k <= cols; ++k) aug[i][k] -= f * aug[rank_row][k];
      }
      ++rank_row;
    }
    for (std::size_t i = rank_row; i < aug.size(); ++i) {
      if (std::abs(aug[i][cols]) > 1e-9) return std::nullopt;  // inconsistent
    }
    std::vector<std::vector<double>> kept_rows;
    std::vector<double> kept_rhs;
    for (std::size_t i = 0; i < rank_row; ++i) {
      kept_rows.push_back(rows[order[i]]);
      kept_rhs.push_back(rhs[order[i]]);
    }
    rows = std::move(kept_rows);
    rhs = std::move(kept_rhs);
  }

  const std::size_t m = rows.size();
  std::vector<double> cost(cols, 0.0);
  double offset = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = p.objective[j];
    offset += p.objective[j] * p.lower[j];
  }

  std::optional<double> best;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (pick.size() == m) {
      std::vector<std::vector<double>> b(m, std::vector<double>(m));
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < m; ++k) b[i][k] = rows[i][pick[k]];
      }
      std::vector<double> y;
      if (!gauss_solve(b, rhs, y)) return;
      double obj = offset;
      for (std::size_t k = 0; k < m; ++k) {
        if (y[k] < -tol) return;
        obj += cost[pick[k]] * y[k];
      }
      if (!best || obj < *best) best = obj;
      return;
    }
    for (std::size_t c = start; c + (m - pick.size()) <= cols; ++c) {
      pick.push_back(c);
      rec(c + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

}  // namespace fairrank::testing

#endif  // FAIRRANK_TESTS_SUPPORT_LP_ORACLE_H_
