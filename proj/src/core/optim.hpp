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
#include <functional>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace srnn {

// A learnable leaf tensor with its gradient accumulator. A weight-normalized
// matrix is stored as two parameters: the direction "<name>.v" and the per-row
// gain "<name>.g".
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string name, Tensor value)
      : name(std::move(name)), value(std::move(value)), grad(this->value.shape()) {}

  void zero_grad() { grad.fill(0.0); }
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 1.0;  // <= 0 disables clipping
};

// First and second moments per parameter plus the step counter.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  uint64_t t = 0;

  static AdamState zeros_like(const std::vector<Parameter*>& params);
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

double global_grad_norm(const std::vector<Parameter*>& params);

// Scales all gradients by clip_norm / norm when norm exceeds clip_norm.
// Returns the norm before clipping.
double clip_global_norm(const std::vector<Parameter*>& params, double clip_norm);

// Clips, then applies one bias-corrected Adam update from the accumulated
// gradients. Gradients are left as clipped; the caller zeroes them.
void adam_step(const std::vector<Parameter*>& params, AdamState& state,
               const AdamConfig& config);

struct GradCheckResult {
  double max_relative_error = 0.0;
  size_t coordinates = 0;
  std::string worst_parameter;
  size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// One coordinate to probe: parameter index and flat element index.
struct GradCoordinate {
  size_t param = 0;
  size_t index = 0;
};

// Draws `per_parameter` random coordinates from every parameter.
std::vector<GradCoordinate> sample_coordinates(const std::vector<Parameter*>& params,
                                               size_t per_parameter, Rng& rng);

// Compares analytic gradients (already accumulated in each Parameter::grad)
// with central differences (f(x+eps) - f(x-eps)) / 2eps of `loss` at the
// given coordinates. Relative error is |a-b| / max(|a|, |b|, 1e-12).
GradCheckResult grad_check(const std::vector<Parameter*>& params,
                           const std::function<double()>& loss,
                           const std::vector<GradCoordinate>& coordinates, double eps = 1e-5);

double relative_error(double a, double b);

}  // namespace srnn
