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

#ifndef FAIRRANK_CDF_H_
#define FAIRRANK_CDF_H_

#include <span>
#include <vector>

namespace fairrank {

// Weighted empirical distribution function.
//
// In step mode F(t) is the cumulative mass at the largest knot <= t, zero
// below the first knot (right-continuous). In linear mode, produced by
// discretized(), F interpolates linearly between stored (knot, mass) points
// and is continuous and increasing between the first and last knot.
//
// Scores outside the support clamp to 0 below and 1 above.
class WeightedEmpiricalCdf {
 public:
  enum class Interpolation { kStep, kLinear };

  WeightedEmpiricalCdf() = default;

  // Throws InconsistentDimensions when knots are not strictly increasing,
  // masses are not nondecreasing in [0, 1], or the last mass is not 1.
  WeightedEmpiricalCdf(std::vector<double> knots, std::vector<double> cum_mass,
                       double total_weight,
                       Interpolation interpolation = Interpolation::kStep);

  double operator()(double t) const { return evaluate(t); }
  double evaluate(double t) const;

  // Generalized inverse inf{t : F(t) >= u}. Throws OutOfRangeU outside [0, 1].
  double quantile(double u) const;

  // Compressed copy holding the quantiles at every `mass_step` of cumulative
  // mass, interpolated linearly.
  WeightedEmpiricalCdf discretized(double mass_step = 1e-4) const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& cum_mass() const { return cum_mass_; }
  double total_weight() const { return total_weight_; }
  Interpolation interpolation() const { return interpolation_; }
  bool empty() const { return knots_.empty(); }

  friend bool operator==(const WeightedEmpiricalCdf&,
                         const WeightedEmpiricalCdf&) = default;

 private:
  std::vector<double> knots_;
  std::vector<double> cum_mass_;
  double total_weight_ = 0.0;
  Interpolation interpolation_ = Interpolation::kStep;
};

// F(t) = sum_i w_i 1{x_i <= t} / sum_i w_i. Tied samples share one knot.
// Errors: EmptyInput, InconsistentDimensions (length mismatch),
// NonPositiveWeight, NonFiniteInput.
WeightedEmpiricalCdf empirical_cdf(std::span<const double> samples,
                                   std::span<const double> weights);

// Unit weights.
WeightedEmpiricalCdf empirical_cdf(std::span<const double> samples);

inline double quantile(const WeightedEmpiricalCdf& cdf, double u) {
  return cdf.quantile(u);
}

}  // namespace fairrank

#endif  // FAIRRANK_CDF_H_
