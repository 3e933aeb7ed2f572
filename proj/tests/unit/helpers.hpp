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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/tape.hpp"
#include "core/tensor.hpp"

namespace srnn::testing {

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    Rng rng(std::hash<std::string>{}(tag) ^ reinterpret_cast<uintptr_t>(this));
    path_ = std::filesystem::temp_directory_path() /
            ("srnn_test_" + tag + "_" + std::to_string(rng.next() % 1000000007ULL));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

// Values in [lo, hi] with magnitude at least `gap`, for ops with a kink at 0.
inline Tensor random_away_from_zero(Rng& rng, Shape shape, double gap) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) {
    const double m = rng.uniform(gap, 1.0);
    v = rng.uniform01() < 0.5 ? -m : m;
  }
  return t;
}

// Relative error whose denominator never drops below `floor`. Gradients
// smaller than the floor are effectively compared in absolute terms, which
// keeps roundoff in the differences of structurally zero gradients (about
// 1e-14) from reading as a large relative error.
inline double floored_relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

using GraphFn = std::function<Var(Tape&, const std::vector<Var>&)>;

// Five-point central difference of f at x along one coordinate. Truncation
// error is O(h^4), so h can be large enough to keep roundoff small.
inline double five_point(const std::function<double(double)>& f, double x, double h) {
  return ((f(x - 2 * h) - f(x + 2 * h)) + 8 * (f(x + h) - f(x - h))) / (12 * h);
}

// Builds `fn` on parameter leaves, projects the output onto fixed random
// weights (magnitudes in [0.5, 1]) and compares the tape gradient of every
// input element with five-point differences. Returns the max relative error.
inline double max_fd_error(const std::vector<Tensor>& inputs, const GraphFn& fn, Rng& rng,
                           double h = 1e-3) {
  Tensor projection;
  const auto build = [&](Tape& tape, const std::vector<Tensor>& values, bool with_grad) {
    std::vector<Var> vars;
    for (const auto& v : values) {
      vars.push_back(with_grad ? tape.parameter(v) : tape.constant(v));
    }
    Var out = fn(tape, vars);
    if (projection.size() == 0) projection = random_away_from_zero(rng, tape.value(out).shape(), 0.5);
    return std::make_pair(vars, tape.sum(tape.mul(out, tape.constant(projection))));
  };
  Tape tape;
  auto [vars, loss] = build(tape, inputs, true);
  tape.backward(loss);

  double worst = 0.0;
  std::vector<Tensor> probe = inputs;
  for (size_t i = 0; i < inputs.size(); ++i) {
    const Tensor analytic = tape.grad(vars[i]);
    for (size_t k = 0; k < inputs[i].size(); ++k) {
      const auto f = [&](double x) {
        probe[i][k] = x;
        Tape t;
        const double value = t.value(build(t, probe, false).second)[0];
        probe[i][k] = inputs[i][k];
        return value;
      };
      const double numeric = five_point(f, inputs[i][k], h);
      worst = std::max(worst, floored_relative_error(analytic[k], numeric));
    }
  }
  return worst;
}

// Band-limited sawtooth: harmonics of f0 below Nyquist, peak about `amp`.
inline std::vector<double> sawtooth(size_t n, double f0, double sample_rate, double amp) {
  std::vector<double> out(n, 0.0);
  const int harmonics = static_cast<int>((sample_rate / 2.0 - 1e-9) / f0);
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 1; k <= harmonics; ++k) {
      s += ((k % 2) ? 1.0 : -1.0) * std::sin(2.0 * std::numbers::pi * k * f0 * i / sample_rate) / k;
    }
    out[i] = std::clamp(amp * (2.0 / std::numbers::pi) * s, -1.0, 1.0);
  }
  return out;
}

// Lag in (first negative autocorrelation, n/2] with the largest normalized
// autocorrelation of the mean-removed signal.
inline size_t dominant_lag(const std::vector<double>& signal) {
  std::vector<double> y = signal;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double r0 = 0.0;
  for (double& v : y) {
    v -= mean;
    r0 += v * v;
  }
  if (r0 == 0.0) return 0;
  bool crossed = false;
  size_t best = 0;
  double best_r = -2.0;
  for (size_t lag = 1; lag <= y.size() / 2; ++lag) {
    double r = 0.0;
    for (size_t i = 0; i + lag < y.size(); ++i) r += y[i] * y[i + lag];
    r /= r0;
    if (r < 0.0) crossed = true;
    if (crossed && r > best_r) {
      best_r = r;
      best = lag;
    }
  }
  return best;
}

}  // namespace srnn::testing
