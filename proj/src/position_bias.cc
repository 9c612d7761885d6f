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

#include "fairrank/position_bias.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairrank/error.h"

namespace fairrank {

const char* to_string(WeightSource source) {
  switch (source) {
    case WeightSource::kRandomized: return "randomized";
    case WeightSource::kObservational: return "observational";
    case WeightSource::kKnown: return "known";
  }
  return "unknown";
}

WeightSource weight_source_from_string(const std::string& name) {
  if (name == "randomized") return WeightSource::kRandomized;
  if (name == "observational") return WeightSource::kObservational;
  if (name == "known") return WeightSource::kKnown;
  throw Error(ErrorCode::kSchemaMismatch, "unknown weight source '" + name + "'");
}

PositionWeights::PositionWeights(std::vector<double> weights,
                                 std::int32_t truncation, WeightSource source,
                                 EstimatorProvenance provenance)
    : weights_(std::move(weights)),
      truncation_(truncation),
      source_(source),
      provenance_(provenance) {
  if (weights_.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no position weights");
  }
  if (weights_[0] != 1.0) {
    throw Error(ErrorCode::kInvalidConfig, "w_1 must be exactly 1");
  }
  if (truncation_ < 1 || truncation_ > size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "truncation " + std::to_string(truncation_) + " outside 1.." +
                    std::to_string(size()));
  }
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    if (!(weights_[j] > 0.0 && weights_[j] <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "w_" + std::to_string(j + 1) + " outside (0, 1]");
    }
    if (static_cast<std::int32_t>(j) >= truncation_ &&
        weights_[j] != weights_[static_cast<std::size_t>(truncation_) - 1]) {
      throw Error(ErrorCode::kInvalidConfig,
                  "weights past the truncation point must equal w_T");
    }
  }
}

PositionWeights PositionWeights::log_decay(std::int32_t positions) {
  std::vector<double> w(static_cast<std::size_t>(positions));
  for (std::int32_t j = 1; j <= positions; ++j) {
    w[static_cast<std::size_t>(j) - 1] = 1.0 / std::log2(1.0 + j);
  }
  return PositionWeights(std::move(w), positions, WeightSource::kKnown);
}

PositionWeights PositionWeights::uniform(std::int32_t positions) {
  return PositionWeights(std::vector<double>(static_cast<std::size_t>(positions), 1.0),
                         positions, WeightSource::kKnown);
}

double PositionWeights::at(std::int32_t position) const {
  if (position < 1 || position > size()) {
    throw Error(ErrorCode::kMissingWeightForPosition,
                "no weight for position " + std::to_string(position));
  }
  return weights_[static_cast<std::size_t>(position) - 1];
}

std::size_t HistogramDensity::bin_of(double score) const {
  auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), score);
  if (it == bin_edges.begin()) return 0;
  const auto k = static_cast<std::size_t>(it - bin_edges.begin()) - 1;
  return std::min(k, bins() - 1);
}

std::vector<double> equal_width_edges(double lo, double hi, std::int32_t bins) {
  if (bins < 1) throw Error(ErrorCode::kInvalidConfig, "bins must be >= 1");
  if (!(lo < hi)) {
    throw Error(ErrorCode::kDegenerateDensity,
                "scores collapse to a single point; no density to estimate");
  }
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  for (std::int32_t b = 0; b <= bins; ++b) {
    edges[static_cast<std::size_t>(b)] =
        lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  }
  edges.back() = hi;
  return edges;
}

HistogramDensity fit_histogram_density(std::span<const double> scores,
                                       std::span<const double> bin_edges,
                                       double smoothing_epsilon) {
  if (scores.empty()) {
    throw Error(ErrorCode::kEmptyPosition, "no scores at this position");
  }
  if (bin_edges.size() < 2) {
    throw Error(ErrorCode::kInconsistentDimensions, "need at least two edges");
  }
  if (smoothing_epsilon < 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "smoothing must be >= 0");
  }
  HistogramDensity h;
  h.bin_edges.assign(bin_edges.begin(), bin_edges.end());
  h.masses.assign(bin_edges.size() - 1, 0.0);
  h.smoothing_epsilon = smoothing_epsilon;
  for (double s : scores) h.masses[h.bin_of(s)] += 1.0;
  const double n = static_cast<double>(scores.size());
  double total = 0.0;
  for (double& m : h.masses) {
    m = m / n + smoothing_epsilon;
    total += m;
  }
  for (double& m : h.masses) m /= total;
  return h;
}

namespace {

std::vector<double> truncate_weights(std::vector<double> w, std::int32_t t) {
  for (std::size_t j = static_cast<std::size_t>(t); j < w.size(); ++j) {
    w[j] = w[static_cast<std::size_t>(t) - 1];
  }
  return w;
}

double clip_weight(double w) {
  return std::clamp(w, kMinPositionWeight, 1.0);
}

}  // namespace

PositionWeights estimate_weights_randomized(const ValidatedDataset& data,
                                            std::int32_t truncation) {
  const std::int32_t positions = data.max_position();
  std::vector<double> shown(static_cast<std::size_t>(positions) + 1, 0.0);
  std::vector<double> positives(shown.size(), 0.0);
  for (const ImpressionRecord& r : data.records()) {
    shown[static_cast<std::size_t>(r.position)] += 1.0;
    if (r.label > 0) positives[static_cast<std::size_t>(r.position)] += 1.0;
  }
  for (std::int32_t j = 1; j <= positions; ++j) {
    if (shown[static_cast<std::size_t>(j)] == 0.0) {
      throw Error(ErrorCode::kNoImpressionsAtPosition,
                  "position " + std::to_string(j));
    }
  }
  const double base_ctr = positives[1] / shown[1];
  if (base_ctr == 0.0) {
    throw Error(ErrorCode::kZeroBaseCTR, "no positives at position 1");
  }
  std::vector<double> w(static_cast<std::size_t>(positions));
  w[0] = 1.0;
  for (std::int32_t j = 2; j <= positions; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    w[jj - 1] = clip_weight(positives[jj] / shown[jj] / base_ctr);
  }
  const std::int32_t t =
      truncation <= 0 ? positions : std::min(truncation, positions);
  EstimatorProvenance prov;
  prov.slot_randomized = true;
  return PositionWeights(truncate_weights(std::move(w), t), t,
                         WeightSource::kRandomized, prov);
}

PositionWeights estimate_weights_observational(const ValidatedDataset& data,
                                               const ObservationalOptions& options) {
  if (options.truncation < 1) {
    throw Error(ErrorCode::kInvalidConfig, "truncation must be >= 1");
  }
  if (!(options.ratio_cap >= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "ratio cap must be >= 1");
  }
  const std::int32_t positions = data.max_position();
  const std::int32_t t = std::min(options.truncation, positions);

  std::vector<std::vector<double>> scores(static_cast<std::size_t>(t) + 1);
  std::vector<std::vector<std::int8_t>> clicked(scores.size());
  for (std::int32_t j = 1; j <= t; ++j) {
    const std::size_t n = data.position_count(j);
    scores[static_cast<std::size_t>(j)].reserve(n);
    clicked[static_cast<std::size_t>(j)].reserve(n);
  }
  for (const ImpressionRecord& r : data.records()) {
    if (r.position > t) continue;
    scores[static_cast<std::size_t>(r.position)].push_back(r.score);
    clicked[static_cast<std::size_t>(r.position)].push_back(r.label > 0 ? 1 : 0);
  }

  auto mean_click = [&](std::int32_t j) {
    const auto& c = clicked[static_cast<std::size_t>(j)];
    if (c.empty()) {
      throw Error(ErrorCode::kEmptyPosition, "position " + std::to_string(j));
    }
    double s = 0.0;
    for (std::int8_t v : c) s += v;
    return s / static_cast<double>(c.size());
  };

  std::vector<double> w(static_cast<std::size_t>(positions), 1.0);
  double running = 1.0;
  for (std::int32_t j = 2; j <= t; ++j) {
    const auto& upper = scores[static_cast<std::size_t>(j) - 1];
    const auto& here = scores[static_cast<std::size_t>(j)];
    if (upper.empty() || here.empty()) {
      throw Error(ErrorCode::kEmptyPosition, "position " + std::to_string(j));
    }
    const double base = mean_click(j - 1);
    if (base == 0.0) {
      throw Error(ErrorCode::kNoPositivesAtPosition,
                  "position " + std::to_string(j - 1));
    }
    const auto [lo_a, hi_a] = std::minmax_element(upper.begin(), upper.end());
    const auto [lo_b, hi_b] = std::minmax_element(here.begin(), here.end());
    const std::vector<double> edges = equal_width_edges(
        std::min(*lo_a, *lo_b), std::max(*hi_a, *hi_b), options.density_bins);
    const HistogramDensity f_upper =
        fit_histogram_density(upper, edges, options.smoothing_epsilon);
    const HistogramDensity f_here =
        fit_histogram_density(here, edges, options.smoothing_epsilon);

    std::vector<double> ratio(f_here.bins());
    for (std::size_t b = 0; b < ratio.size(); ++b) {
      // A zero-mass bin on this position never gets looked up.
      ratio[b] = f_here.masses[b] > 0.0
                     ? std::clamp(f_upper.masses[b] / f_here.masses[b],
                                  1.0 / options.ratio_cap, options.ratio_cap)
                     : 0.0;
    }
    const auto& c = clicked[static_cast<std::size_t>(j)];
    double weighted = 0.0;
    for (std::size_t i = 0; i < here.size(); ++i) {
      if (c[i]) weighted += ratio[f_here.bin_of(here[i])];
    }
    const double eta = weighted / static_cast<double>(here.size()) / base;
    running *= eta;
    w[static_cast<std::size_t>(j) - 1] = clip_weight(running);
  }
  EstimatorProvenance prov;
  prov.density_bins = options.density_bins;
  prov.smoothing_epsilon = options.smoothing_epsilon;
  prov.ratio_cap = options.ratio_cap;
  return PositionWeights(truncate_weights(std::move(w), t), t,
                         WeightSource::kObservational, prov);
}

}  // namespace fairrank
