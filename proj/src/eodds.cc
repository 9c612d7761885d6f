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

#include "fairrank/eodds.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "fairrank/error.h"

namespace fairrank {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "alpha " + std::to_string(alpha) + " outside [0, 1]");
  }
}

std::size_t find_group(const std::vector<GroupId>& groups, GroupId g) {
  auto it = std::find(groups.begin(), groups.end(), g);
  if (it == groups.end()) {
    throw Error(ErrorCode::kUnknownGroup, "group " + std::to_string(g) + " not known");
  }
  return static_cast<std::size_t>(it - groups.begin());
}

}  // namespace

BinCounts::BinCounts(std::vector<GroupId> groups, std::int32_t num_labels,
                     std::size_t bins, std::int32_t positions)
    : groups_(std::move(groups)),
      num_labels_(num_labels),
      bins_(bins),
      positions_(positions) {
  if (groups_.empty() || num_labels_ < 1 || bins_ == 0 || positions_ < 1) {
    throw Error(ErrorCode::kInconsistentDimensions, "empty count table");
  }
  data_.assign(groups_.size() * static_cast<std::size_t>(num_labels_) * bins_ *
                   static_cast<std::size_t>(positions_),
               0.0);
}

std::size_t BinCounts::group_index(GroupId g) const { return find_group(groups_, g); }

double BinCounts::total() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0);
}

BinCounts tally_counts(const ValidatedDataset& data, const ScorePartition& partition,
                       ScoreMap map) {
  BinCounts counts(data.groups(), data.max_label() + 1, partition.size(),
                   data.max_position());
  for (const ImpressionRecord& r : data.records()) {
    const std::size_t k = partition.bin_of(apply_score_map(map, r.score));
    counts.at(counts.group_index(r.group), r.label, k, r.position) += 1.0;
  }
  return counts;
}

BinCounts adjust_counts(const BinCounts& counts, const PositionWeights& weights) {
  BinCounts out(counts.groups(), counts.num_labels(), counts.bins(), counts.positions());
  const std::int32_t labels = counts.num_labels();
  for (std::int32_t j = 1; j <= counts.positions(); ++j) {
    // Weights are only needed where something was logged.
    double observed = 0.0;
    for (std::size_t g = 0; g < counts.groups().size(); ++g) {
      for (std::int32_t y = 0; y < labels; ++y) {
        for (std::size_t k = 0; k < counts.bins(); ++k) observed += counts.at(g, y, k, j);
      }
    }
    if (observed == 0.0) continue;
    const double w = weights.at(j);
    for (std::size_t g = 0; g < counts.groups().size(); ++g) {
      for (std::size_t k = 0; k < counts.bins(); ++k) {
        double total = 0.0;
        double inflated = 0.0;
        for (std::int32_t y = 0; y < labels; ++y) {
          const double n = counts.at(g, y, k, j);
          total += n;
          if (y >= 1) {
            out.at(g, y, k, j) = n / w;
            inflated += n / w;
          }
        }
        double negatives = total - inflated;
        if (negatives < 0.0) {
          negatives = 0.0;
          ++out.floored_negatives;
        }
        out.at(g, 0, k, j) = negatives;
      }
    }
  }
  return out;
}

ConditionalBinProbs estimate_bin_probs(const BinCounts& adjusted) {
  ConditionalBinProbs out;
  out.groups = adjusted.groups();
  out.num_labels = adjusted.num_labels();
  out.bins = adjusted.bins();
  const std::size_t groups = out.groups.size();
  const std::size_t bins = out.bins;
  out.probs.assign(groups * static_cast<std::size_t>(out.num_labels),
                   std::vector<double>(bins, 0.0));
  out.source_mass.assign(groups, std::vector<double>(bins, 0.0));
  double grand_total = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::int32_t y = 0; y < out.num_labels; ++y) {
      auto& p = out.probs[g * static_cast<std::size_t>(out.num_labels) +
                          static_cast<std::size_t>(y)];
      double total = 0.0;
      for (std::size_t k = 0; k < bins; ++k) {
        double s = 0.0;
        for (std::int32_t j = 1; j <= adjusted.positions(); ++j) s += adjusted.at(g, y, k, j);
        p[k] = s;
        total += s;
        out.source_mass[g][k] += s;
      }
      if (!(total > 0.0)) {
        throw Error(ErrorCode::kEmptyStratum,
                    "no mass for group " + std::to_string(out.groups[g]) + ", label " +
                        std::to_string(y));
      }
      for (double& v : p) v /= total;
      grand_total += total;
    }
  }
  for (auto& row : out.source_mass) {
    for (double& v : row) v /= grand_total;
  }
  return out;
}

const char* to_string(EoddsMode mode) {
  switch (mode) {
    case EoddsMode::kStrict: return "strict";
    case EoddsMode::kMultiOutcome: return "multi";
    case EoddsMode::kDifferential: return "diff";
  }
  return "strict";
}

EoddsMode eodds_mode_from_string(const std::string& name) {
  if (name == "strict") return EoddsMode::kStrict;
  if (name == "multi" || name == "multi_outcome") return EoddsMode::kMultiOutcome;
  if (name == "diff" || name == "differential") return EoddsMode::kDifferential;
  throw Error(ErrorCode::kInvalidConfig, "unknown mode '" + name + "'");
}

void EoddsConstraintSpec::validate() const {
  if (outcomes < 1) {
    throw Error(ErrorCode::kInvalidConfig, "outcomes must be at least 1");
  }
  if (std::isnan(epsilon0) || std::isnan(epsilon1) || epsilon0 < 0.0 || epsilon1 < 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "epsilon must be >= 0 or infinite");
  }
  if (mode == EoddsMode::kDifferential && std::isinf(epsilon0) && std::isinf(epsilon1)) {
    throw Error(ErrorCode::kInvalidConfig,
                "differential mode needs a finite epsilon for at least one label");
  }
}

LpProblem build_lp(const ConditionalBinProbs& probs, const ScorePartition& partition,
                   const EoddsConstraintSpec& spec) {
  spec.validate();
  const std::size_t groups = probs.groups.size();
  const std::size_t bins = partition.size();
  if (groups < 2) {
    throw Error(ErrorCode::kSingleGroup, "need at least two groups to equalize");
  }
  const auto labels = static_cast<std::size_t>(probs.num_labels);
  const bool binary_mode = spec.mode != EoddsMode::kMultiOutcome;
  const std::size_t expected_labels =
      binary_mode ? 2 : static_cast<std::size_t>(spec.outcomes) + 1;
  if (probs.bins != bins || labels != expected_labels ||
      probs.probs.size() != groups * labels || probs.source_mass.size() != groups) {
    throw Error(ErrorCode::kInconsistentDimensions,
                "bin probabilities do not match the partition or mode");
  }
  for (const auto& v : probs.probs) {
    if (v.size() != bins) {
      throw Error(ErrorCode::kInconsistentDimensions, "probability vector length");
    }
  }
  for (const auto& v : probs.source_mass) {
    if (v.size() != bins) {
      throw Error(ErrorCode::kInconsistentDimensions, "source mass length");
    }
  }

  LpProblem lp(groups * bins * bins);
  std::fill(lp.upper.begin(), lp.upper.end(), 1.0);
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t k = 0; k < bins; ++k) {
      for (std::size_t t = 0; t < bins; ++t) {
        lp.objective[transition_var(g, k, t, bins)] =
            probs.source_mass[g][k] *
            std::abs(partition.midpoint(k) - partition.midpoint(t));
      }
    }
  }

  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t k = 0; k < bins; ++k) {
      const std::size_t r = lp.add_eq_row(1.0);
      for (std::size_t t = 0; t < bins; ++t) lp.eq_matrix(r, transition_var(g, k, t, bins)) = 1.0;
    }
  }

  if (spec.mode != EoddsMode::kDifferential) {
    for (std::size_t y = 0; y < labels; ++y) {
      const auto& ref = probs.of(0, static_cast<std::int32_t>(y));
      for (std::size_t g = 1; g < groups; ++g) {
        const auto& pi = probs.of(g, static_cast<std::int32_t>(y));
        for (std::size_t t = 0; t < bins; ++t) {
          const std::size_t r = lp.add_eq_row(0.0);
          for (std::size_t k = 0; k < bins; ++k) {
            lp.eq_matrix(r, transition_var(g, k, t, bins)) += pi[k];
            lp.eq_matrix(r, transition_var(0, k, t, bins)) -= ref[k];
          }
        }
      }
    }
    return lp;
  }

  // Cum_a(t) <= e^eps Cum_b(t) for every ordered pair; the last endpoint is
  // implied by row-stochasticity.
  for (std::size_t y = 0; y < 2; ++y) {
    const double eps = y == 0 ? spec.epsilon0 : spec.epsilon1;
    if (std::isinf(eps)) continue;
    const double factor = std::exp(eps);
    for (std::size_t a = 0; a < groups; ++a) {
      for (std::size_t b = 0; b < groups; ++b) {
        if (a == b) continue;
        const auto& pa = probs.of(a, static_cast<std::int32_t>(y));
        const auto& pb = probs.of(b, static_cast<std::int32_t>(y));
        for (std::size_t end = 0; end + 1 < bins; ++end) {
          const std::size_t r = lp.add_ineq_row(0.0);
          for (std::size_t t = 0; t <= end; ++t) {
            for (std::size_t k = 0; k < bins; ++k) {
              lp.ineq_matrix(r, transition_var(a, k, t, bins)) += pa[k];
              lp.ineq_matrix(r, transition_var(b, k, t, bins)) -= factor * pb[k];
            }
          }
        }
      }
    }
  }
  return lp;
}

std::size_t EoddsModel::group_index(GroupId g) const { return find_group(groups, g); }

EoddsModel EoddsModel::with_alpha(double new_alpha) const {
  check_alpha(new_alpha);
  EoddsModel m = *this;
  m.alpha = new_alpha;
  return m;
}

double EoddsModel::post_cdf(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const std::size_t k = partition.bin_of(t);
  double below = 0.0;
  for (std::size_t i = 0; i < k; ++i) below += post_bin_mass[i];
  const double frac = (t - partition.lower(k)) / (partition.upper(k) - partition.lower(k));
  return std::clamp(below + frac * post_bin_mass[k], 0.0, 1.0);
}

EoddsModel train_eodds(const ValidatedDataset& data, const PositionWeights& weights,
                       const ScorePartition& partition,
                       const EoddsConstraintSpec& spec, const EoddsOptions& options) {
  check_alpha(options.alpha);
  spec.validate();
  const BinCounts raw = tally_counts(data, partition, options.score_map);
  const BinCounts adjusted = adjust_counts(raw, weights);
  const ConditionalBinProbs probs = estimate_bin_probs(adjusted);
  const LpProblem lp = build_lp(probs, partition, spec);

  const auto start = std::chrono::steady_clock::now();
  const LpSolution sol = solve_lp(lp, options.lp);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  switch (sol.status) {
    case LpStatus::kOptimal: break;
    case LpStatus::kInfeasible:
      throw Error(ErrorCode::kInfeasible, "transition LP has no feasible point");
    case LpStatus::kUnbounded:
      throw Error(ErrorCode::kUnbounded, "transition LP is unbounded");
    case LpStatus::kIterationLimit:
      throw Error(ErrorCode::kIterationLimit,
                  "simplex stopped after " + std::to_string(sol.iterations) + " pivots");
  }

  EoddsModel model;
  model.partition = partition;
  model.groups = probs.groups;
  model.score_map = options.score_map;
  model.seed = options.seed;
  model.alpha = options.alpha;
  model.rescale = options.rescale;

  const std::size_t bins = partition.size();
  const std::size_t groups = probs.groups.size();
  model.transition.assign(groups, std::vector<std::vector<double>>(
                                      bins, std::vector<double>(bins, 0.0)));
  double row_err = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t k = 0; k < bins; ++k) {
      auto& row = model.transition[g][k];
      if (probs.source_mass[g][k] == 0.0) {
        // No training mass: the LP leaves this row free, so do not move.
        row[k] = 1.0;
        continue;
      }
      double sum = 0.0;
      for (std::size_t t = 0; t < bins; ++t) {
        row[t] = std::max(0.0, sol.x[transition_var(g, k, t, bins)]);
        sum += row[t];
      }
      for (double& v : row) v /= sum;
      row_err = std::max(row_err,
                         std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0));
    }
  }

  model.post_bin_mass.assign(bins, 0.0);
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t k = 0; k < bins; ++k) {
      const double m = probs.source_mass[g][k];
      if (m == 0.0) continue;
      for (std::size_t t = 0; t < bins; ++t) {
        model.post_bin_mass[t] += m * model.transition[g][k][t];
      }
    }
  }
  const double post_total =
      std::accumulate(model.post_bin_mass.begin(), model.post_bin_mass.end(), 0.0);
  for (double& v : model.post_bin_mass) v /= post_total;

  std::vector<double> scores;
  scores.reserve(data.size());
  for (const ImpressionRecord& r : data.records()) scores.push_back(r.score);
  model.pooled_pre_cdf = empirical_cdf(scores);

  const FeasibilityReport feas = check_solution(lp, sol.x);
  model.report.lp_status = sol.status;
  model.report.lp_iterations = sol.iterations;
  model.report.lp_objective = sol.objective_value;
  model.report.max_constraint_residual = feas.worst();
  model.report.max_row_sum_error = row_err;
  model.report.floored_negatives = adjusted.floored_negatives;
  model.report.solve_seconds = seconds;
  return model;
}

std::span<const double> transition_distribution(const EoddsModel& model,
                                                GroupId group, std::size_t bin) {
  const std::size_t g = model.group_index(group);
  if (bin >= model.partition.size()) {
    throw Error(ErrorCode::kBinOutOfRange,
                "bin " + std::to_string(bin) + " of " +
                    std::to_string(model.partition.size()));
  }
  return model.transition[g][bin];
}

double score_eodds(const EoddsModel& model, double unit_score, GroupId group,
                   CounterRng& rng) {
  const std::size_t g = model.group_index(group);
  const std::size_t k = model.partition.bin_of(unit_score);
  const auto& row = model.transition[g][k];
  const double u = rng.uniform();
  std::size_t dest = row.size() - 1;
  double acc = 0.0;
  for (std::size_t t = 0; t < row.size(); ++t) {
    acc += row[t];
    if (u < acc) {
      dest = t;
      break;
    }
  }
  // Guard against round-off landing past the last nonzero entry.
  while (row[dest] == 0.0 && dest > 0) --dest;
  const double lo = model.partition.lower(dest);
  const double hi = model.partition.upper(dest);
  const double s = lo + rng.uniform() * (hi - lo);
  return s < hi ? s : lo;
}

double eodds_fair_score(const EoddsModel& model, const ImpressionRecord& record) {
  if (model.alpha == 0.0) return record.score;
  CounterRng rng(model.seed, Stream::kEoddsScoring, {record.query_id, record.item_id});
  const double fair01 =
      score_eodds(model, apply_score_map(model.score_map, record.score), record.group, rng);
  const double fair =
      model.rescale ? model.pooled_pre_cdf.quantile(model.post_cdf(fair01)) : fair01;
  return model.alpha * fair + (1.0 - model.alpha) * record.score;
}

std::vector<double> apply_transition(const EoddsModel& model, GroupId group,
                                     std::span<const double> source_probs) {
  const std::size_t g = model.group_index(group);
  const std::size_t bins = model.partition.size();
  if (source_probs.size() != bins) {
    throw Error(ErrorCode::kInconsistentDimensions, "source vector length");
  }
  std::vector<double> out(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k) {
    for (std::size_t t = 0; t < bins; ++t) out[t] += source_probs[k] * model.transition[g][k][t];
  }
  return out;
}

}  // namespace fairrank
