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

#ifndef FAIRRANK_POSITION_BIAS_H_
#define FAIRRANK_POSITION_BIAS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairrank/dataset.h"

namespace fairrank {

enum class WeightSource { kRandomized, kObservational, kKnown };

const char* to_string(WeightSource source);
WeightSource weight_source_from_string(const std::string& name);

// Estimator settings recorded next to the weights. None of these are fixed by
// the method itself, so they travel with every estimate.
struct EstimatorProvenance {
  std::int32_t density_bins = 0;
  double smoothing_epsilon = 0.0;
  double ratio_cap = 0.0;
  bool slot_randomized = false;
};

// Positive-response decay factors w_j = P(Y(j) = 1 | Y(1) = 1), indexed by
// 1-based position. Invariants enforced at construction: w_1 = 1,
// 0 < w_j <= 1, and w_j = w_T for every j > T.
class PositionWeights {
 public:
  PositionWeights(std::vector<double> weights, std::int32_t truncation,
                  WeightSource source, EstimatorProvenance provenance = {});

  // w_j = 1 / log2(1 + j) for j = 1..positions, no truncation.
  static PositionWeights log_decay(std::int32_t positions);
  // No position bias.
  static PositionWeights uniform(std::int32_t positions);

  // Throws MissingWeightForPosition when position is outside 1..size().
  double at(std::int32_t position) const;

  std::int32_t size() const { return static_cast<std::int32_t>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  std::int32_t truncation() const { return truncation_; }
  WeightSource source() const { return source_; }
  const EstimatorProvenance& provenance() const { return provenance_; }

  friend bool operator==(const PositionWeights& a, const PositionWeights& b) {
    return a.weights_ == b.weights_ && a.truncation_ == b.truncation_ &&
           a.source_ == b.source_;
  }

 private:
  std::vector<double> weights_;
  std::int32_t truncation_;
  WeightSource source_;
  EstimatorProvenance provenance_;
};

// Smallest weight an estimate may take; keeps 1/w finite downstream.
inline constexpr double kMinPositionWeight = 1e-6;

struct HistogramDensity {
  std::vector<double> bin_edges;  // increasing, bins() + 1 entries
  std::vector<double> masses;     // sums to 1
  double smoothing_epsilon = 0.0;

  std::size_t bins() const { return masses.size(); }
  // Bin holding `score`; scores outside the edges fall in the end bins.
  std::size_t bin_of(double score) const;
  double mass_at(double score) const { return masses[bin_of(score)]; }
};

// Equal-width edges over [lo, hi]. Throws DegenerateDensity when lo >= hi.
std::vector<double> equal_width_edges(double lo, double hi, std::int32_t bins);

// Smoothed relative frequencies: (count_b / n + eps) renormalized.
// Errors: EmptyPosition, InconsistentDimensions (fewer than 2 edges).
HistogramDensity fit_histogram_density(std::span<const double> scores,
                                       std::span<const double> bin_edges,
                                       double smoothing_epsilon = 1e-6);

// w_j = CTR(j) / CTR(1) for slot-randomized logs; positions past `truncation`
// reuse w_T. truncation <= 0 means no truncation.
// Errors: NoImpressionsAtPosition, ZeroBaseCTR.
PositionWeights estimate_weights_randomized(const ValidatedDataset& data,
                                            std::int32_t truncation = 0);

struct ObservationalOptions {
  std::int32_t truncation = 30;
  std::int32_t density_bins = 50;
  double smoothing_epsilon = 1e-6;
  double ratio_cap = 20.0;
};

// Adjacent-pairwise importance sampling on logs ranked by the production
// scorer. For 2 <= j <= T:
//
//   eta_j = mean_{pos j}[ Y * f_{j-1}(s) / f_j(s) ] / mean_{pos j-1}[ Y ]
//   w_j   = prod_{r=2}^{min(j, T)} eta_r        (then clipped to <= 1)
//
// f_j is a histogram of the scores shown at position j; each adjacent pair
// shares equal-width edges spanning both positions' scores, and the bin-wise
// ratio is clipped to [1/ratio_cap, ratio_cap].
//
// Errors: InvalidConfig (T < 1), NoPositivesAtPosition, DegenerateDensity,
// EmptyPosition.
PositionWeights estimate_weights_observational(
    const ValidatedDataset& data, const ObservationalOptions& options = {});

}  // namespace fairrank

#endif  // FAIRRANK_POSITION_BIAS_H_
