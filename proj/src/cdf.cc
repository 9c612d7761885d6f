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

#include "fairrank/cdf.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fairrank/error.h"

namespace fairrank {

WeightedEmpiricalCdf::WeightedEmpiricalCdf(std::vector<double> knots,
                                           std::vector<double> cum_mass,
                                           double total_weight,
                                           Interpolation interpolation)
    : knots_(std::move(knots)),
      cum_mass_(std::move(cum_mass)),
      total_weight_(total_weight),
      interpolation_(interpolation) {
  if (knots_.empty() || knots_.size() != cum_mass_.size()) {
    throw Error(ErrorCode::kInconsistentDimensions,
                "cdf needs matching, nonempty knots and masses");
  }
  if (!(total_weight_ > 0.0)) {
    throw Error(ErrorCode::kNonPositiveWeight, "cdf total weight must be > 0");
  }
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i]) || cum_mass_[i] < 0.0 || cum_mass_[i] > 1.0) {
      throw Error(ErrorCode::kInconsistentDimensions,
                  "bad knot or mass at index " + std::to_string(i));
    }
    if (i > 0 && (!(knots_[i] > knots_[i - 1]) ||
                  cum_mass_[i] < cum_mass_[i - 1])) {
      throw Error(ErrorCode::kInconsistentDimensions,
                  "knots must increase and masses must not decrease");
    }
  }
  if (std::abs(cum_mass_.back() - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInconsistentDimensions, "cdf must end at 1");
  }
}

double WeightedEmpiricalCdf::evaluate(double t) const {
  if (knots_.empty()) {
    throw Error(ErrorCode::kEmptyInput, "evaluating an empty cdf");
  }
  // First knot strictly greater than t.
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return 0.0;
  const auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  if (interpolation_ == Interpolation::kStep || i + 1 == knots_.size()) {
    return cum_mass_[i];
  }
  const double frac = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
  return cum_mass_[i] + frac * (cum_mass_[i + 1] - cum_mass_[i]);
}

double WeightedEmpiricalCdf::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw Error(ErrorCode::kOutOfRangeU, "u = " + std::to_string(u));
  }
  if (knots_.empty()) {
    throw Error(ErrorCode::kEmptyInput, "inverting an empty cdf");
  }
  auto it = std::lower_bound(cum_mass_.begin(), cum_mass_.end(), u);
  if (it == cum_mass_.end()) return knots_.back();
  const auto i = static_cast<std::size_t>(it - cum_mass_.begin());
  if (interpolation_ == Interpolation::kStep || i == 0) return knots_[i];
  const double lo = cum_mass_[i - 1];
  const double hi = cum_mass_[i];
  if (hi <= lo) return knots_[i];
  const double frac = (u - lo) / (hi - lo);
  return knots_[i - 1] + frac * (knots_[i] - knots_[i - 1]);
}

WeightedEmpiricalCdf WeightedEmpiricalCdf::discretized(double mass_step) const {
  if (!(mass_step > 0.0 && mass_step <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "mass_step must be in (0, 1]");
  }
  const auto levels = static_cast<std::size_t>(std::llround(1.0 / mass_step));
  std::vector<double> knots;
  std::vector<double> mass;
  knots.reserve(levels + 1);
  mass.reserve(levels + 1);
  for (std::size_t i = 0; i <= levels; ++i) {
    const double u =
        i == levels ? 1.0 : static_cast<double>(i) / static_cast<double>(levels);
    const double x = quantile(u);
    if (!knots.empty() && x == knots.back()) {
      mass.back() = u;
    } else {
      knots.push_back(x);
      mass.push_back(u);
    }
  }
  return WeightedEmpiricalCdf(std::move(knots), std::move(mass), total_weight_,
                              Interpolation::kLinear);
}

WeightedEmpiricalCdf empirical_cdf(std::span<const double> samples,
                                   std::span<const double> weights) {
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no samples for empirical cdf");
  }
  if (samples.size() != weights.size()) {
    throw Error(ErrorCode::kInconsistentDimensions,
                "samples and weights differ in length");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw Error(ErrorCode::kNonFiniteInput,
                  "sample " + std::to_string(i) + " is not finite");
    }
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw Error(ErrorCode::kNonPositiveWeight,
                  "weight " + std::to_string(i) + " must be positive");
    }
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return samples[a] < samples[b] || (samples[a] == samples[b] && a < b);
  });

  std::vector<double> knots;
  std::vector<double> prefix;
  double running = 0.0;
  for (std::size_t idx : order) {
    running += weights[idx];
    if (!knots.empty() && samples[idx] == knots.back()) {
      prefix.back() = running;
    } else {
      knots.push_back(samples[idx]);
      prefix.push_back(running);
    }
  }
  const double total = running;
  for (double& p : prefix) p = std::min(1.0, p / total);
  prefix.back() = 1.0;
  return WeightedEmpiricalCdf(std::move(knots), std::move(prefix), total);
}

WeightedEmpiricalCdf empirical_cdf(std::span<const double> samples) {
  std::vector<double> ones(samples.size(), 1.0);
  return empirical_cdf(samples, ones);
}

}  // namespace fairrank
