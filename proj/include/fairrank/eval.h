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

#ifndef FAIRRANK_EVAL_H_
#define FAIRRANK_EVAL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "fairrank/dataset.h"
#include "fairrank/eodds.h"
#include "fairrank/eopp.h"
#include "fairrank/position_bias.h"
#include "fairrank/simulate.h"
#include "fairrank/types.h"

namespace fairrank {

// sup_t |F_a(t) - F_b(t)| over the pooled sample points, right-continuous
// empirical CDFs. Errors: EmptyInput.
double ks_distance(std::span<const double> a, std::span<const double> b);

// Per label: the largest two-sample KS distance between the score samples of
// any two groups, using the labels carried by the records.
// Errors: SingleGroup, EmptyStratum (a group lacks a label some other group
// has).
std::map<std::int32_t, double> unfairness_report(std::span<const ImpressionRecord> records);

// Share of rows with a positive label. Errors: EmptyInput.
double ctr(std::span<const ImpressionRecord> records);

// sum_c P(C = c) sum_k P(I_k | c, Y = 0) sum_{k' >= k} P(I_k' | c, Y = 1).
// Errors: NonBinaryLabels, UnknownGroup (a group without a prior).
double riemann_auc(const ConditionalBinProbs& probs,
                   const std::map<GroupId, double>& group_priors);

// Bin probabilities after applying the model's transition rows.
ConditionalBinProbs transform_bin_probs(const EoddsModel& model,
                                        const ConditionalBinProbs& probs);

// v_obs(c) / M_c per group: observed positive rate over counterfactual
// positive rate. Errors: MissingTruth, EmptyStratum (a group with no
// counterfactual positives).
std::map<GroupId, double> exposure_parity(const SimLog& log);

// Largest |r_c - mean| / mean over the exposure ratios.
double max_relative_exposure_gap(const std::map<GroupId, double>& ratios);

// Copy of the log's rows with each label replaced by the item's Y(1).
std::vector<ImpressionRecord> counterfactual_records(const SimLog& log);

struct EvalReport {
  std::map<std::int32_t, double> ks_by_label;
  double ctr = 0.0;
  std::optional<double> auc_riemann;
  std::map<GroupId, double> exposure_ratios;
};

enum class Reranker { kEopp, kEodds };

const char* to_string(Reranker reranker);
Reranker reranker_from_string(const std::string& name);

struct TradeoffRow {
  double alpha = 0.0;
  double ks_pos = 0.0;
  double ks_neg = 0.0;
  double ctr = 0.0;
};

// Metrics of one relabeled log in sweep units.
TradeoffRow tradeoff_metrics(double alpha, std::span<const ImpressionRecord> records);

struct SweepOptions {
  EoppOptions eopp;
  std::size_t bins = 100;
  EoddsConstraintSpec eodds_spec;
  EoddsOptions eodds;
  // Sweep points are independent; results do not depend on this.
  std::size_t threads = 1;
};

// Trains the chosen reranker once on `train`, then for every alpha blends,
// reranks and relabels `validation`, and measures KS per label and CTR.
// Errors: InvalidConfig (alpha outside [0, 1]) plus everything upstream.
std::vector<TradeoffRow> tradeoff_sweep(const ValidatedDataset& train,
                                        const PositionWeights& weights,
                                        const SimLog& validation,
                                        const SimConfig& config,
                                        std::span<const double> alphas,
                                        Reranker reranker,
                                        const SweepOptions& options = {});

// Sweeps of an already trained model. `threads` as in SweepOptions.
std::vector<TradeoffRow> sweep_eopp(const EoppModel& model, const SimLog& validation,
                                    const SimConfig& config, std::span<const double> alphas,
                                    std::size_t threads = 1);
std::vector<TradeoffRow> sweep_eodds(const EoddsModel& model, const SimLog& validation,
                                     const SimConfig& config, std::span<const double> alphas,
                                     std::size_t threads = 1);

// Header `alpha,ks_pos,ks_neg,ctr`, one row per entry.
void write_tradeoff_csv(std::ostream& out, std::span<const TradeoffRow> rows);

}  // namespace fairrank

#endif  // FAIRRANK_EVAL_H_
