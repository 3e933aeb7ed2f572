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

#include "core/optim.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace srnn {

AdamState AdamState::zeros_like(const std::vector<Parameter*>& params) {
  AdamState state;
  for (const Parameter* p : params) {
    state.m.emplace_back(p->value.shape());
    state.v.emplace_back(p->value.shape());
  }
  return state;
}

double global_grad_norm(const std::vector<Parameter*>& params) {
  double sq = 0.0;
  for (const Parameter* p : params) {
    for (double g : p->grad.values()) sq += g * g;
  }
  return std::sqrt(sq);
}

double clip_global_norm(const std::vector<Parameter*>& params, double clip_norm) {
  const double norm = global_grad_norm(params);
  if (clip_norm > 0.0 && norm > clip_norm) {
    const double factor = clip_norm / norm;
    for (Parameter* p : params) {
      for (double& g : p->grad.values()) g *= factor;
    }
  }
  return norm;
}

void adam_step(const std::vector<Parameter*>& params, AdamState& state,
               const AdamConfig& config) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw Error(ErrorCode::kInvalidArgument, "adam: state does not match parameters");
  }
  clip_global_norm(params, config.clip_norm);
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    Tensor& m = state.m[k];
    Tensor& v = state.v[k];
    if (m.shape() != p.value.shape() || v.shape() != p.value.shape()) {
      throw Error(ErrorCode::kInvalidArgument, "adam: moment shape mismatch for " + p.name);
    }
    for (size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p.value[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

std::vector<GradCoordinate> sample_coordinates(const std::vector<Parameter*>& params,
                                               size_t per_parameter, Rng& rng) {
  std::vector<GradCoordinate> coords;
  for (size_t k = 0; k < params.size(); ++k) {
    const size_t n = params[k]->value.size();
    for (size_t i = 0; i < per_parameter; ++i) coords.push_back({k, rng.below(n)});
  }
  return coords;
}

GradCheckResult grad_check(const std::vector<Parameter*>& params,
                           const std::function<double()>& loss,
                           const std::vector<GradCoordinate>& coordinates, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "grad_check: eps must be > 0");
  GradCheckResult result;
  for (const auto& c : coordinates) {
    Parameter& p = *params.at(c.param);
    double& x = p.value[c.index];
    const double saved = x;
    x = saved + eps;
    const double up = loss();
    x = saved - eps;
    const double down = loss();
    x = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double analytic = p.grad[c.index];
    const double err = relative_error(analytic, numeric);
    ++result.coordinates;
    if (err > result.max_relative_error || result.worst_parameter.empty()) {
      result.max_relative_error = std::max(result.max_relative_error, err);
      result.worst_parameter = p.name;
      result.worst_index = c.index;
      result.worst_analytic = analytic;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

}  // namespace srnn
