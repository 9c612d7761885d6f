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

#include "fairrank/eval.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <set>
#include <string>
#include <thread>

#include "fairrank/error.h"

namespace fairrank {

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::kEmptyInput, "KS distance needs two nonempty samples");
  }
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

std::map<std::int32_t, double> unfairness_report(std::span<const ImpressionRecord> records) {
  std::map<std::int32_t, std::map<GroupId, std::vector<double>>> samples;
  std::set<GroupId> groups;
  for (const ImpressionRecord& r : records) {
    samples[r.label][r.group].push_back(r.score);
    groups.insert(r.group);
  }
  if (groups.size() < 2) {
    throw Error(ErrorCode::kSingleGroup, "unfairness needs at least two groups");
  }
  std::map<std::int32_t, double> out;
  for (const auto& [label, by_group] : samples) {
    for (GroupId g : groups) {
      if (!by_group.contains(g)) {
        throw Error(ErrorCode::kEmptyStratum, "group " + std::to_string(g) +
                                                  " has no rows with label " +
                                                  std::to_string(label));
      }
    }
    double worst = 0.0;
    for (auto a = by_group.begin(); a != by_group.end(); ++a) {
      for (auto b = std::next(a); b != by_group.end(); ++b) {
        worst = std::max(worst, ks_distance(a->second, b->second));
      }
    }
    out[label] = worst;
  }
  return out;
}

double ctr(std::span<const ImpressionRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "CTR of an empty log");
  double positives = 0.0;
  for (const ImpressionRecord& r : records) positives += r.label > 0 ? 1.0 : 0.0;
  return positives / static_cast<double>(records.size());
}

double riemann_auc(const ConditionalBinProbs& probs,
                   const std::map<GroupId, double>& group_priors) {
  if (probs.num_labels != 2) {
    throw Error(ErrorCode::kNonBinaryLabels,
                std::to_string(probs.num_labels) + " labels; AUC needs two");
  }
  double auc = 0.0;
  for (std::size_t g = 0; g < probs.groups.size(); ++g) {
    auto it = group_priors.find(probs.groups[g]);
    if (it == group_priors.end()) {
      throw Error(ErrorCode::kUnknownGroup,
                  "no prior for group " + std::to_string(probs.groups[g]));
    }
    const auto& neg = probs.of(g, 0);
    const auto& pos = probs.of(g, 1);
    double tail = 0.0;  // sum_{k' >= k} pos[k']
    double inner = 0.0;
    for (std::size_t k = probs.bins; k-- > 0;) {
      tail += pos[k];
      inner += neg[k] * tail;
    }
    auc += it->second * inner;
  }
  return auc;
}

ConditionalBinProbs transform_bin_probs(const EoddsModel& model,
                                        const ConditionalBinProbs& probs) {
  ConditionalBinProbs out = probs;
  for (std::size_t g = 0; g < probs.groups.size(); ++g) {
    for (std::int32_t y = 0; y < probs.num_labels; ++y) {
      out.probs[g * static_cast<std::size_t>(probs.num_labels) + static_cast<std::size_t>(y)] =
          apply_transition(model, probs.groups[g], probs.of(g, y));
    }
    out.source_mass[g] = apply_transition(model, probs.groups[g], probs.source_mass[g]);
  }
  return out;
}

std::map<GroupId, double> exposure_parity(const SimLog& log) {
  std::map<GroupId, double> rows;
  std::map<GroupId, double> observed;
  std::map<GroupId, double> merit;
  for (const ImpressionRecord& r : log.records) {
    const SimulatedItem& truth = log.item(r.item_id);
    rows[r.group] += 1.0;
    observed[r.group] += r.label > 0 ? 1.0 : 0.0;
    merit[r.group] += truth.counterfactual_label;
  }
  std::map<GroupId, double> out;
  for (const auto& [g, n] : rows) {
    if (merit[g] == 0.0) {
      throw Error(ErrorCode::kEmptyStratum,
                  "group " + std::to_string(g) + " has no counterfactual positives");
    }
    out[g] = (observed[g] / n) / (merit[g] / n);
  }
  return out;
}

double max_relative_exposure_gap(const std::map<GroupId, double>& ratios) {
  if (ratios.empty()) return 0.0;
  double mean = 0.0;
  for (const auto& [g, r] : ratios) mean += r;
  mean /= static_cast<double>(ratios.size());
  double worst = 0.0;
  for (const auto& [g, r] : ratios) worst = std::max(worst, std::abs(r - mean) / mean);
  return worst;
}

std::vector<ImpressionRecord> counterfactual_records(const SimLog& log) {
  std::vector<ImpressionRecord> out = log.records;
  for (ImpressionRecord& r : out) r.label = log.item(r.item_id).counterfactual_label;
  return out;
}

const char* to_string(Reranker reranker) {
  return reranker == Reranker::kEopp ? "eopp" : "eodds";
}

Reranker reranker_from_string(const std::string& name) {
  if (name == "eopp") return Reranker::kEopp;
  if (name == "eodds") return Reranker::kEodds;
  throw Error(ErrorCode::kInvalidConfig, "unknown reranker '" + name + "'");
}

TradeoffRow tradeoff_metrics(double alpha, std::span<const ImpressionRecord> records) {
  const auto ks = unfairness_report(records);
  TradeoffRow row;
  row.alpha = alpha;
  row.ks_pos = ks.contains(1) ? ks.at(1) : 0.0;
  row.ks_neg = ks.contains(0) ? ks.at(0) : 0.0;
  row.ctr = ctr(records);
  return row;
}

namespace {

void check_alphas(std::span<const double> alphas) {
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "alpha " + std::to_string(a) + " outside [0, 1]");
    }
  }
}

// Runs point(i) for every index, on up to `threads` workers. The first
// failure by index is rethrown.
void parallel_points(std::size_t n, std::size_t threads,
                     const std::function<void(std::size_t)>& point) {
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) point(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          point(i);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

}  // namespace

std::vector<TradeoffRow> sweep_eopp(const EoppModel& model, const SimLog& validation,
                                    const SimConfig& config, std::span<const double> alphas,
                                    std::size_t threads) {
  check_alphas(alphas);
  std::vector<TradeoffRow> rows(alphas.size());
  parallel_points(alphas.size(), threads, [&](std::size_t i) {
    const EoppModel m = model.with_alpha(alphas[i]);
    const SimLog out = rerank_and_relabel(
        validation,
        [&m](const ImpressionRecord& r) { return score_eopp(m, r.score, r.group); }, config);
    rows[i] = tradeoff_metrics(alphas[i], out.records);
  });
  return rows;
}

std::vector<TradeoffRow> sweep_eodds(const EoddsModel& model, const SimLog& validation,
                                     const SimConfig& config, std::span<const double> alphas,
                                     std::size_t threads) {
  check_alphas(alphas);
  std::vector<TradeoffRow> rows(alphas.size());
  parallel_points(alphas.size(), threads, [&](std::size_t i) {
    const EoddsModel m = model.with_alpha(alphas[i]);
    const SimLog out = rerank_and_relabel(
        validation, [&m](const ImpressionRecord& r) { return eodds_fair_score(m, r); },
        config);
    rows[i] = tradeoff_metrics(alphas[i], out.records);
  });
  return rows;
}

std::vector<TradeoffRow> tradeoff_sweep(const ValidatedDataset& train,
                                        const PositionWeights& weights,
                                        const SimLog& validation,
                                        const SimConfig& config,
                                        std::span<const double> alphas,
                                        Reranker reranker,
                                        const SweepOptions& options) {
  check_alphas(alphas);
  if (reranker == Reranker::kEopp) {
    return sweep_eopp(train_eopp(train, weights, options.eopp), validation, config, alphas,
                      options.threads);
  }
  return sweep_eodds(train_eodds(train, weights, ScorePartition::equal_width(options.bins),
                                 options.eodds_spec, options.eodds),
                     validation, config, alphas, options.threads);
}

void write_tradeoff_csv(std::ostream& out, std::span<const TradeoffRow> rows) {
  auto num = [](double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  out << "alpha,ks_pos,ks_neg,ctr\n";
  for (const TradeoffRow& r : rows) {
    out << num(r.alpha) << ',' << num(r.ks_pos) << ',' << num(r.ks_neg) << ','
        << num(r.ctr) << '\n';
  }
}

}  // namespace fairrank
