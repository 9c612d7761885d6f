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

#ifndef FAIRRANK_RNG_H_
#define FAIRRANK_RNG_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace fairrank {

// Identifier recorded in run metadata so outputs can be tied to the generator.
inline constexpr const char* kRngName = "splitmix64-substream-v1";

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Draw-type tags used to carve independent substreams out of one seed.
enum class Stream : std::uint64_t {
  kPopulation = 1,
  kQuerySample = 2,
  kScoreNoise = 3,
  kLabel = 4,
  kRelabel = 5,
  kEoddsScoring = 6,
  kTest = 99,
};

// Counter-based generator: the output sequence is a pure function of the key,
// so any (seed, query, item, draw-type) tuple can be replayed in isolation and
// in any order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(splitmix64(key)) {}

  CounterRng(std::uint64_t seed, Stream stream,
             std::initializer_list<std::uint64_t> ids)
      : key_(derive(seed, stream, ids)) {}

  static std::uint64_t derive(std::uint64_t seed, Stream stream,
                              std::initializer_list<std::uint64_t> ids) {
    std::uint64_t k = splitmix64(seed ^ 0xA0761D6478BD642FULL);
    k = splitmix64(k ^ static_cast<std::uint64_t>(stream));
    for (std::uint64_t id : ids) k = splitmix64(k ^ id);
    return k;
  }

  std::uint64_t next_u64() {
    return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * (++counter_));
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift with rejection for an unbiased draw.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; implemented here rather than via <random> so draws are
  // identical across standard library implementations.
  double normal(double mean, double stddev) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return mean + stddev * r * std::cos(theta);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fairrank

#endif  // FAIRRANK_RNG_H_
