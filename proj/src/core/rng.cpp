// Copyright 2026 The srnn Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/rng.hpp"

#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace srnn {

double Rng::gaussian() {
  const double u1 = uniform01();
  const double u2 = uniform01();
  // 1 - u1 lies in (0, 1], so the log is finite.
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t splitmix64_once(uint64_t seed) {
  Rng rng(seed);
  return rng.next();
}

size_t sample_categorical(std::span<const double> probabilities, double u) {
  if (probabilities.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "categorical: empty probability vector");
  }
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "categorical: negative or NaN probability");
    }
    total += p;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "categorical: no probability mass");
  }
  const double threshold = u * total;
  double cumulative = 0.0;
  size_t last_positive = 0;
  for (size_t i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities[i];
    if (probabilities[i] > 0.0) last_positive = i;
    if (cumulative > threshold) return i;
  }
  // Rounding left the running sum at or below u*total.
  return last_positive;
}

}  // namespace srnn
