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

#include "fairrank/simulate.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fairrank/error.h"
#include "fairrank/rng.h"

namespace fairrank {

void SimConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(group_prob) || !prob(pos_rate_group0) || !prob(pos_rate_group1)) {
    throw Error(ErrorCode::kInvalidConfig, "probabilities must lie in [0, 1]");
  }
  if (!(relevance_noise_var > 0.0) || !(score_noise_var > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "noise variances must be > 0");
  }
  if (population_size < 1 || slots < 1 || n_queries < 0) {
    throw Error(ErrorCode::kInvalidConfig, "sizes must be positive");
  }
  if (slots > population_size) {
    throw Error(ErrorCode::kSlotsExceedPopulation,
                std::to_string(slots) + " slots > population of " +
                    std::to_string(population_size));
  }
}

double simulated_decay(std::int32_t position) {
  return 1.0 / std::log2(1.0 + static_cast<double>(position));
}

const SimulatedItem& SimLog::item(std::uint64_t item_id) const {
  if (item_id >= truth.size()) {
    throw Error(ErrorCode::kMissingTruth,
                "item " + std::to_string(item_id) + " has no ground truth");
  }
  return truth[item_id];
}

std::vector<SimulatedItem> generate_population(const SimConfig& config) {
  config.validate();
  std::vector<SimulatedItem> items(static_cast<std::size_t>(config.population_size));
  const double rel_sd = std::sqrt(config.relevance_noise_var);
  for (std::size_t i = 0; i < items.size(); ++i) {
    CounterRng rng(config.seed, Stream::kPopulation, {i});
    SimulatedItem& it = items[i];
    it.item_id = i;
    it.group = rng.bernoulli(config.group_prob) ? 1 : 0;
    const double pos_rate =
        it.group == 1 ? config.pos_rate_group1 : config.pos_rate_group0;
    it.counterfactual_label = rng.bernoulli(pos_rate) ? 1 : 0;
    const double y = it.counterfactual_label;
    double r = rng.normal(0.6 * y + 2.0 * it.group, rel_sd);
    if (it.group == 0) r += rng.uniform() * (1.0 + y);
    it.relevance = r;
  }
  return items;
}

namespace {

constexpr std::uint64_t kSplitQueryStride = 1'000'000'000ULL;

// Orders rows by descending score, ties by ascending item id.
void rank_rows(std::vector<ImpressionRecord>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const ImpressionRecord& a, const ImpressionRecord& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.item_id < b.item_id;
            });
}

}  // namespace

SimLog generate_queries(const std::vector<SimulatedItem>& population,
                        const SimConfig& config, std::uint64_t split) {
  config.validate();
  if (static_cast<std::int64_t>(population.size()) < config.slots) {
    throw Error(ErrorCode::kSlotsExceedPopulation,
                "population smaller than the number of slots");
  }
  const auto slots = static_cast<std::size_t>(config.slots);
  const double score_sd = std::sqrt(config.score_noise_var);
  const std::uint64_t p = population.size();

  SimLog log;
  log.truth = population;
  log.records.reserve(static_cast<std::size_t>(config.n_queries) * slots);
  std::vector<std::uint64_t> picked;
  std::vector<ImpressionRecord> rows;
  for (std::int64_t q = 0; q < config.n_queries; ++q) {
    const std::uint64_t query_id = split * kSplitQueryStride +
                                   static_cast<std::uint64_t>(q);
    // Floyd's algorithm: `slots` distinct items without replacement.
    CounterRng sampler(config.seed, Stream::kQuerySample, {split, query_id});
    picked.clear();
    for (std::uint64_t j = p - slots; j < p; ++j) {
      const std::uint64_t t = sampler.below(j + 1);
      if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
        picked.push_back(t);
      } else {
        picked.push_back(j);
      }
    }
    std::sort(picked.begin(), picked.end());

    rows.clear();
    for (std::uint64_t id : picked) {
      CounterRng noise(config.seed, Stream::kScoreNoise, {split, query_id, id});
      ImpressionRecord r;
      r.query_id = query_id;
      r.item_id = id;
      r.group = population[id].group;
      r.score = population[id].relevance + noise.normal(0.0, score_sd);
      rows.push_back(r);
    }
    rank_rows(rows);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      ImpressionRecord& r = rows[k];
      r.position = static_cast<std::int32_t>(k) + 1;
      CounterRng label(config.seed, Stream::kLabel, {split, query_id, r.item_id});
      const bool shown_positive = label.bernoulli(simulated_decay(r.position));
      r.label = population[r.item_id].counterfactual_label == 1 && shown_positive;
      log.records.push_back(r);
    }
  }
  return log;
}

SimLog rerank_and_relabel(const SimLog& log, const RecordScorer& scorer,
                          const SimConfig& config) {
  SimLog out;
  out.truth = log.truth;
  out.records.reserve(log.records.size());
  std::vector<ImpressionRecord> rows;
  std::size_t begin = 0;
  while (begin < log.records.size()) {
    std::size_t end = begin;
    while (end < log.records.size() &&
           log.records[end].query_id == log.records[begin].query_id) {
      ++end;
    }
    rows.assign(log.records.begin() + static_cast<std::ptrdiff_t>(begin),
                log.records.begin() + static_cast<std::ptrdiff_t>(end));
    for (ImpressionRecord& r : rows) {
      (void)log.item(r.item_id);
      try {
        r.score = scorer(r);
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kScorerFailure,
                    "query " + std::to_string(r.query_id) + ", item " +
                        std::to_string(r.item_id) + ": " + e.what());
      }
    }
    rank_rows(rows);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      ImpressionRecord& r = rows[k];
      r.position = static_cast<std::int32_t>(k) + 1;
      CounterRng label(config.seed, Stream::kRelabel, {r.query_id, r.item_id});
      const bool shown_positive = label.bernoulli(simulated_decay(r.position));
      r.label = log.truth[r.item_id].counterfactual_label == 1 && shown_positive;
      out.records.push_back(r);
    }
    begin = end;
  }
  return out;
}

}  // namespace fairrank
