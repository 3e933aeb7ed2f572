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

#pragma once

#include <cstdint>
#include <span>

namespace srnn {

// splitmix64. Every random decision in the project (shuffles, init, h0,
// sampling, titles) is driven by this stream so runs are reproducible
// bit-for-bit across platforms and languages.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double gaussian();

  // Uniform integer in [0, n) as next() mod n.
  uint64_t below(uint64_t n) { return next() % n; }

  uint64_t state() const { return state_; }
  void set_state(uint64_t state) { state_ = state; }

 private:
  uint64_t state_;
};

// First output of a fresh stream seeded with `seed`. Used to derive
// decorrelated per-stage seeds from one master seed.
uint64_t splitmix64_once(uint64_t seed);

// Index of the first entry whose cumulative (renormalized) probability is
// strictly greater than u, with u in [0, 1). Throws on an empty vector or a
// vector with no positive mass.
size_t sample_categorical(std::span<const double> probabilities, double u);

}  // namespace srnn
