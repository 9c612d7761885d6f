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

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "fairrank/error.h"

namespace fairrank {

std::size_t DenseMatrix::add_row() {
  data.resize(data.size() + cols, 0.0);
  return rows++;
}

LpProblem::LpProblem(std::size_t num_vars)
    : objective(num_vars, 0.0),
      eq_matrix(0, num_vars),
      ineq_matrix(0, num_vars),
      lower(num_vars, 0.0),
      upper(num_vars, kInf) {}

std::size_t LpProblem::add_eq_row(double rhs) {
  eq_rhs.push_back(rhs);
  return eq_matrix.add_row();
}

std::size_t LpProblem::add_ineq_row(double rhs) {
  ineq_rhs.push_back(rhs);
  return ineq_matrix.add_row();
}

void LpProblem::validate() const {
  const std::size_t n = num_vars();
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kMalformedProblem, what);
  };
  if (lower.size() != n || upper.size() != n) fail("bounds length");
  if (eq_matrix.cols != n || ineq_matrix.cols != n) fail("matrix width");
  if (eq_matrix.rows != eq_rhs.size()) fail("equality rhs length");
  if (ineq_matrix.rows != ineq_rhs.size()) fail("inequality rhs length");
  if (eq_matrix.data.size() != eq_matrix.rows * n ||
      ineq_matrix.data.size() != ineq_matrix.rows * n) {
    fail("matrix storage");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j])) fail("objective coefficient not finite");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] ||
        lower[j] == kInf || upper[j] == -kInf) {
      fail("bad bounds on variable " + std::to_string(j));
    }
  }
  for (double v : eq_matrix.data) if (!std::isfinite(v)) fail("A not finite");
  for (double v : ineq_matrix.data) if (!std::isfinite(v)) fail("G not finite");
  for (double v : eq_rhs) if (!std::isfinite(v)) fail("b not finite");
  for (double v : ineq_rhs) if (!std::isfinite(v)) fail("h not finite");
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "Optimal";
    case LpStatus::kInfeasible: return "Infeasible";
    case LpStatus::kUnbounded: return "Unbounded";
    case LpStatus::kIterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

namespace {

// How an original variable maps onto nonnegative internal columns.
enum class VarKind { kShiftLower, kMirrorUpper, kSplit };

struct VarMap {
  VarKind kind;
  std::size_t col;  // first internal column
};

// Internal form: min c'x  s.t.  A x = b,  0 <= x <= u, with A holding the
// structural columns, one slack per inequality row and one artificial per
// row (last m columns).
class RevisedSimplex {
 public:
  RevisedSimplex(const LpProblem& p, const LpOptions& opt) : opt_(opt) {
    const std::size_t n = p.num_vars();
    const std::size_t m_eq = p.eq_matrix.rows;
    const std::size_t m_in = p.ineq_matrix.rows;
    m_ = m_eq + m_in;

    std::size_t cols = 0;
    maps_.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (std::isfinite(p.lower[j])) {
        maps_.push_back({VarKind::kShiftLower, cols});
        upper_.push_back(p.upper[j] - p.lower[j]);
        cost_.push_back(p.objective[j]);
        cols += 1;
      } else if (std::isfinite(p.upper[j])) {
        maps_.push_back({VarKind::kMirrorUpper, cols});
        upper_.push_back(kInf);
        cost_.push_back(-p.objective[j]);
        cols += 1;
      } else {
        maps_.push_back({VarKind::kSplit, cols});
        upper_.insert(upper_.end(), {kInf, kInf});
        cost_.push_back(p.objective[j]);
        cost_.push_back(-p.objective[j]);
        cols += 2;
      }
    }
    const std::size_t slack_begin = cols;
    n_ = cols + m_in;
    total_ = n_ + m_;
    upper_.resize(total_, kInf);
    cost_.resize(total_, 0.0);

    std::vector<std::vector<std::pair<std::size_t, double>>> entries(total_);
    b_.assign(m_, 0.0);
    auto load_row = [&](std::size_t r, std::span<const double> coeffs, double rhs) {
      for (std::size_t j = 0; j < n; ++j) {
        const double a = coeffs[j];
        if (a == 0.0) continue;
        const VarMap& vm = maps_[j];
        switch (vm.kind) {
          case VarKind::kShiftLower:
            entries[vm.col].emplace_back(r, a);
            rhs -= a * p.lower[j];
            break;
          case VarKind::kMirrorUpper:
            entries[vm.col].emplace_back(r, -a);
            rhs -= a * p.upper[j];
            break;
          case VarKind::kSplit:
            entries[vm.col].emplace_back(r, a);
            entries[vm.col + 1].emplace_back(r, -a);
            break;
        }
      }
      b_[r] = rhs;
    };
    for (std::size_t r = 0; r < m_eq; ++r) load_row(r, p.eq_matrix.row(r), p.eq_rhs[r]);
    for (std::size_t r = 0; r < m_in; ++r) {
      load_row(m_eq + r, p.ineq_matrix.row(r), p.ineq_rhs[r]);
      entries[slack_begin + r].emplace_back(m_eq + r, 1.0);
    }
    for (std::size_t r = 0; r < m_; ++r) {
      entries[n_ + r].emplace_back(r, b_[r] < 0.0 ? -1.0 : 1.0);
    }
    col_start_.assign(total_ + 1, 0);
    for (std::size_t j = 0; j < total_; ++j) {
      col_start_[j + 1] = col_start_[j] + entries[j].size();
    }
    row_idx_.reserve(col_start_.back());
    val_.reserve(col_start_.back());
    for (const auto& col : entries) {
      for (const auto& [r, a] : col) {
        row_idx_.push_back(r);
        val_.push_back(a);
      }
    }

    // Start from the all-artificial basis.
    basis_.resize(m_);
    basis_pos_.assign(total_, kNonbasic);
    at_upper_.assign(total_, false);
    for (std::size_t r = 0; r < m_; ++r) {
      basis_[r] = n_ + r;
      basis_pos_[n_ + r] = r;
    }
    binv_.assign(m_ * m_, 0.0);
    xb_.assign(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      binv_[r * m_ + r] = b_[r] < 0.0 ? -1.0 : 1.0;
      xb_[r] = std::abs(b_[r]);
    }
  }

  LpSolution run(const LpProblem& p) {
    if (m_ == 0) return finish_without_rows(p);

    // Phase 1: minimize the sum of artificials.
    std::vector<double> phase_one(total_, 0.0);
    std::fill(phase_one.begin() + static_cast<std::ptrdiff_t>(n_), phase_one.end(), 1.0);
    LpStatus st = iterate(phase_one, /*allow_artificials=*/true);
    if (st == LpStatus::kIterationLimit) return finish(p, st);
    refactor();
    double infeasibility = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] >= n_) infeasibility += std::max(0.0, xb_[r]);
    }
    double scale = 1.0;
    for (double b : b_) scale = std::max(scale, std::abs(b));
    if (infeasibility > opt_.feasibility_tol * scale) return finish(p, LpStatus::kInfeasible);

    // Phase 2: artificials are pinned to zero and may only leave.
    for (std::size_t j = n_; j < total_; ++j) upper_[j] = 0.0;
    st = iterate(cost_, /*allow_artificials=*/false);
    refactor();
    return finish(p, st);
  }

 private:
  static constexpr std::size_t kNonbasic = static_cast<std::size_t>(-1);

  double nonbasic_value(std::size_t j) const { return at_upper_[j] ? upper_[j] : 0.0; }

  // alpha = B^{-1} A_j; binv_ is column-major.
  void ftran(std::size_t j, std::vector<double>& alpha) const {
    alpha.assign(m_, 0.0);
    for (std::size_t e = col_start_[j]; e < col_start_[j + 1]; ++e) {
      const double a = val_[e];
      const double* col = &binv_[row_idx_[e] * m_];
      for (std::size_t r = 0; r < m_; ++r) alpha[r] += a * col[r];
    }
  }

  // y' = c_B' B^{-1}.
  void btran(const std::vector<double>& costs, std::vector<double>& y) const {
    y.assign(m_, 0.0);
    cb_.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) cb_[r] = costs[basis_[r]];
    for (std::size_t i = 0; i < m_; ++i) {
      const double* col = &binv_[i * m_];
      double s = 0.0;
      for (std::size_t r = 0; r < m_; ++r) s += cb_[r] * col[r];
      y[i] = s;
    }
  }

  double reduced_cost(const std::vector<double>& costs, const std::vector<double>& y,
                      std::size_t j) const {
    double d = costs[j];
    for (std::size_t e = col_start_[j]; e < col_start_[j + 1]; ++e) {
      d -= val_[e] * y[row_idx_[e]];
    }
    return d;
  }

  void update_inverse(std::size_t leave, const std::vector<double>& alpha) {
    const double inv = 1.0 / alpha[leave];
    for (std::size_t i = 0; i < m_; ++i) {
      double* col = &binv_[i * m_];
      const double piv = col[leave] * inv;
      if (piv == 0.0) continue;
      for (std::size_t r = 0; r < m_; ++r) col[r] -= alpha[r] * piv;
      col[leave] = piv;
    }
  }

  // Rebuilds B^{-1} from the basic columns by Gauss-Jordan elimination with
  // partial pivoting, then recomputes the basic values.
  void refactor() {
    std::vector<double> work(m_ * m_, 0.0);  // column-major B
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t j = basis_[r];
      for (std::size_t e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        work[r * m_ + row_idx_[e]] = val_[e];
      }
    }
    // Solve B X = I on the row-major copy [B | I].
    std::vector<double> aug(m_ * 2 * m_, 0.0);
    const std::size_t w = 2 * m_;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t c = 0; c < m_; ++c) aug[i * w + c] = work[c * m_ + i];
      aug[i * w + m_ + i] = 1.0;
    }
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      for (std::size_t i = c + 1; i < m_; ++i) {
        if (std::abs(aug[i * w + c]) > std::abs(aug[piv * w + c])) piv = i;
      }
      // Numerically singular: keep the updated inverse.
      if (std::abs(aug[piv * w + c]) < 1e-13) {
        recompute_basic_values();
        return;
      }
      if (piv != c) {
        std::swap_ranges(aug.begin() + static_cast<std::ptrdiff_t>(piv * w),
                         aug.begin() + static_cast<std::ptrdiff_t>((piv + 1) * w),
                         aug.begin() + static_cast<std::ptrdiff_t>(c * w));
      }
      double* prow = &aug[c * w];
      const double inv = 1.0 / prow[c];
      for (std::size_t k = 0; k < w; ++k) prow[k] *= inv;
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == c) continue;
        double* row = &aug[i * w];
        const double f = row[c];
        if (f == 0.0) continue;
        for (std::size_t k = c; k < w; ++k) row[k] -= f * prow[k];
      }
    }
    // Row i of X = B^{-1} is aug[i][m..2m); store column-major.
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t c = 0; c < m_; ++c) binv_[c * m_ + i] = aug[i * w + m_ + c];
    }
    recompute_basic_values();
  }

  void recompute_basic_values() {
    std::vector<double> rhs = b_;
    for (std::size_t j = 0; j < total_; ++j) {
      if (basis_pos_[j] != kNonbasic || !at_upper_[j]) continue;
      const double u = upper_[j];
      for (std::size_t e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        rhs[row_idx_[e]] -= val_[e] * u;
      }
    }
    std::fill(xb_.begin(), xb_.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (rhs[i] == 0.0) continue;
      const double* col = &binv_[i * m_];
      for (std::size_t r = 0; r < m_; ++r) xb_[r] += col[r] * rhs[i];
    }
  }

  LpStatus iterate(const std::vector<double>& costs, bool allow_artificials) {
    std::size_t streak = 0;
    std::size_t since_refactor = 0;
    bool bland = false;
    std::vector<double> y;
    std::vector<double> alpha;
    const std::size_t candidates = allow_artificials ? total_ : n_;
    while (true) {
      if (iterations_ >= opt_.max_iterations) return LpStatus::kIterationLimit;
      if (since_refactor >= opt_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }

      // Pricing.
      btran(costs, y);
      std::size_t enter = total_;
      double best = 0.0;
      for (std::size_t j = 0; j < candidates; ++j) {
        if (basis_pos_[j] != kNonbasic || upper_[j] == 0.0) continue;
        const double d = reduced_cost(costs, y, j);
        const bool improving =
            at_upper_[j] ? d > opt_.optimality_tol : d < -opt_.optimality_tol;
        if (!improving) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = j;
        }
      }
      if (enter == total_) return LpStatus::kOptimal;

      // Ratio test. Moving the entering column by t in direction `dir`
      // changes basic value r by -dir * alpha[r] * t.
      ftran(enter, alpha);
      const double dir = at_upper_[enter] ? -1.0 : 1.0;
      const double range = upper_[enter];
      auto limit_of = [&](std::size_t r, double a, double slack) {
        if (a > 0.0) return (xb_[r] + slack) / a;
        return (upper_[basis_[r]] - xb_[r] + slack) / -a;
      };
      auto blocks = [&](std::size_t r, double a) {
        if (a > opt_.pivot_tol) return true;
        return a < -opt_.pivot_tol && std::isfinite(upper_[basis_[r]]);
      };

      std::size_t leave = m_;
      double step = range;
      if (bland) {
        for (std::size_t r = 0; r < m_; ++r) {
          const double a = dir * alpha[r];
          if (!blocks(r, a)) continue;
          const double lim = std::max(0.0, limit_of(r, a, 0.0));
          if (lim < step || (lim == step && leave != m_ && basis_[r] < basis_[leave])) {
            step = lim;
            leave = r;
          }
        }
      } else {
        // Harris: relaxed bound first, then the largest pivot under it.
        double relaxed = range;
        for (std::size_t r = 0; r < m_; ++r) {
          const double a = dir * alpha[r];
          if (blocks(r, a)) relaxed = std::min(relaxed, limit_of(r, a, opt_.feasibility_tol));
        }
        if (range > relaxed) {
          double best_pivot = 0.0;
          for (std::size_t r = 0; r < m_; ++r) {
            const double a = dir * alpha[r];
            if (!blocks(r, a)) continue;
            if (limit_of(r, a, 0.0) <= relaxed && std::abs(a) > best_pivot) {
              best_pivot = std::abs(a);
              leave = r;
            }
          }
          if (leave != m_) step = std::max(0.0, limit_of(leave, dir * alpha[leave], 0.0));
        }
      }
      if (!std::isfinite(step)) return LpStatus::kUnbounded;
      ++iterations_;

      if (step <= 1e-12) {
        if (++streak >= opt_.degenerate_streak) bland = true;
      } else {
        streak = 0;
        bland = false;
      }

      if (step != 0.0) {
        for (std::size_t r = 0; r < m_; ++r) xb_[r] -= dir * alpha[r] * step;
      }
      if (leave == m_) {
        // Bound flip: the entering column reaches its opposite bound first.
        at_upper_[enter] = !at_upper_[enter];
        continue;
      }
      const double entering_value = nonbasic_value(enter) + dir * step;
      const std::size_t leaving = basis_[leave];
      basis_pos_[leaving] = kNonbasic;
      at_upper_[leaving] = dir * alpha[leave] < 0.0;
      update_inverse(leave, alpha);
      basis_[leave] = enter;
      basis_pos_[enter] = leave;
      at_upper_[enter] = false;
      xb_[leave] = entering_value;
      ++since_refactor;
    }
  }

  LpSolution finish_without_rows(const LpProblem& p) {
    // Every column is independent: sit each at its cheaper bound.
    for (std::size_t j = 0; j < n_; ++j) {
      if (cost_[j] < 0.0) {
        if (!std::isfinite(upper_[j])) return finish(p, LpStatus::kUnbounded);
        at_upper_[j] = true;
      }
    }
    return finish(p, LpStatus::kOptimal);
  }

  LpSolution finish(const LpProblem& p, LpStatus status) {
    std::vector<double> internal(total_, 0.0);
    for (std::size_t j = 0; j < total_; ++j) {
      if (basis_pos_[j] == kNonbasic) internal[j] = nonbasic_value(j);
    }
    for (std::size_t r = 0; r < m_; ++r) {
      // Harris steps may leave basics a hair outside their bounds.
      double v = xb_[r];
      if (status == LpStatus::kOptimal) v = std::clamp(v, 0.0, upper_[basis_[r]]);
      internal[basis_[r]] = v;
    }
    LpSolution sol;
    sol.status = status;
    sol.iterations = iterations_;
    sol.x.resize(p.num_vars());
    for (std::size_t j = 0; j < p.num_vars(); ++j) {
      const VarMap& vm = maps_[j];
      switch (vm.kind) {
        case VarKind::kShiftLower:
          sol.x[j] = p.lower[j] + internal[vm.col];
          break;
        case VarKind::kMirrorUpper:
          sol.x[j] = p.upper[j] - internal[vm.col];
          break;
        case VarKind::kSplit:
          sol.x[j] = internal[vm.col] - internal[vm.col + 1];
          break;
      }
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < p.num_vars(); ++j) obj += p.objective[j] * sol.x[j];
    sol.objective_value = obj;
    return sol;
  }

  LpOptions opt_;
  std::size_t m_ = 0;
  std::size_t n_ = 0;      // structural plus slack columns
  std::size_t total_ = 0;  // n_ plus one artificial per row
  std::vector<VarMap> maps_;
  std::vector<double> upper_;
  std::vector<double> cost_;
  std::vector<double> b_;
  std::vector<std::size_t> col_start_;
  std::vector<std::size_t> row_idx_;
  std::vector<double> val_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> basis_pos_;
  std::vector<bool> at_upper_;
  std::vector<double> binv_;
  std::vector<double> xb_;
  mutable std::vector<double> cb_;
  std::size_t iterations_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
  problem.validate();
  RevisedSimplex simplex(problem, options);
  return simplex.run(problem);
}

double FeasibilityReport::worst() const {
  return std::max({max_eq_residual, max_ineq_violation, max_bound_violation});
}

FeasibilityReport check_solution(const LpProblem& problem,
                                 std::span<const double> x) {
  if (x.size() != problem.num_vars()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "solution has " + std::to_string(x.size()) + " entries, problem has " +
                    std::to_string(problem.num_vars()) + " variables");
  }
  FeasibilityReport rep;
  auto dot = [&](std::span<const double> row) {
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * x[j];
    return s;
  };
  for (std::size_t r = 0; r < problem.eq_matrix.rows; ++r) {
    rep.max_eq_residual = std::max(
        rep.max_eq_residual, std::abs(dot(problem.eq_matrix.row(r)) - problem.eq_rhs[r]));
  }
  for (std::size_t r = 0; r < problem.ineq_matrix.rows; ++r) {
    rep.max_ineq_violation = std::max(
        rep.max_ineq_violation, dot(problem.ineq_matrix.row(r)) - problem.ineq_rhs[r]);
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    rep.max_bound_violation =
        std::max({rep.max_bound_violation, problem.lower[j] - x[j], x[j] - problem.upper[j]});
  }
  return rep;
}

void write_listing(std::ostream& out, const LpProblem& problem) {
  const auto prec = out.precision(17);
  out << "vars " << problem.num_vars() << "\n";
  out << "minimize";
  for (double c : problem.objective) out << ' ' << c;
  out << "\n";
  for (std::size_t j = 0; j < problem.num_vars(); ++j) {
    out << "bound " << j << ' ' << problem.lower[j] << ' ' << problem.upper[j] << "\n";
  }
  auto rows = [&](const char* tag, const DenseMatrix& m,
                  const std::vector<double>& rhs) {
    for (std::size_t r = 0; r < m.rows; ++r) {
      out << tag;
      for (std::size_t j = 0; j < m.cols; ++j) {
        if (m(r, j) != 0.0) out << ' ' << j << ':' << m(r, j);
      }
      out << " rhs " << rhs[r] << "\n";
    }
  };
  rows("eq", problem.eq_matrix, problem.eq_rhs);
  rows("le", problem.ineq_matrix, problem.ineq_rhs);
  out.precision(prec);
}

}  // namespace fairrank
