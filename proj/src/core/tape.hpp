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
#include <span>
#include <vector>

#include "core/tensor.hpp"

namespace srnn {

// Handle to a value recorded on a Tape.
struct Var {
  uint32_t id = UINT32_MAX;
  bool valid() const { return id != UINT32_MAX; }
};

// Reverse-mode differentiation over a linear recording of operations.
// Nodes are appended in evaluation order, so a reverse sweep visits every
// node after all of its consumers. Values produced from inputs that do not
// require gradients carry no backward closure, which makes the same forward
// code usable for inference.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf that never receives a gradient.
  Var constant(Tensor value);
  // Like constant() but borrows `value`; it must outlive the tape.
  Var constant_ref(const Tensor& value);
  Var constant_ref(Tensor&&) = delete;
  // Leaf that receives a gradient; backward() adds it into *grad_sink when
  // one is given. `value` is borrowed.
  Var parameter(const Tensor& value, Tensor* grad_sink = nullptr);
  Var parameter(Tensor&&, Tensor* = nullptr) = delete;

  const Tensor& value(Var v) const;
  // Gradient of the last backward() target with respect to v (zeros if v
  // was not reached).
  Tensor grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  size_t size() const { return nodes_.size(); }

  // Digest of every relu on/off decision made so far. Two evaluations with
  // equal digests lie in the same linear region of the relus.
  uint64_t relu_pattern() const { return relu_pattern_; }

  // Seeds d(target) = 1 for a single-element target and sweeps backwards.
  void backward(Var target);

  // ---- operations ----
  Var matmul(Var a, Var b);                  // [m x k] * [k x n]
  Var linear(Var x, Var weight);             // x [n x in] * weight[out x in]^T
  Var add(Var a, Var b);                     // same shape
  Var add_bias(Var x, Var bias);             // bias [cols] added to every row
  Var mul(Var a, Var b);                     // elementwise
  Var scale(Var a, double factor);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var relu(Var a);                           // gradient 0 at exactly 0
  Var slice_cols(Var a, size_t begin, size_t end);
  Var slice_rows(Var a, size_t begin, size_t end);
  Var concat_rows(std::span<const Var> parts);
  Var reshape(Var a, Shape shape);
  // Output row r is the concatenation of table rows indices[r*per_row ...
  // r*per_row + per_row - 1].
  Var embed(Var table, std::span<const int> indices, size_t per_row);
  // w_row = g_row * v_row / |v_row| for v [out x in], g [out].
  Var weight_norm(Var v, Var g);
  // Mean over rows of -log softmax(logits)[target]; result has shape [1].
  Var softmax_cross_entropy(Var logits, std::span<const int> targets);
  // 0.5 * sum of squares; shape [1].
  Var half_sum_squares(Var a);
  // Sum of all entries; shape [1].
  Var sum(Var a);

 private:
  using Backward = std::function<void(Tape&, const Tensor& out_grad)>;

  struct Node {
    Tensor owned;
    const Tensor* borrowed = nullptr;
    Tensor grad;
    bool requires_grad = false;
    Tensor* grad_sink = nullptr;
    Backward backward;
    const Tensor& value() const { return borrowed ? *borrowed : owned; }
  };

  Var push(Tensor value, bool requires_grad, Backward backward);
  bool any_requires_grad(std::initializer_list<Var> vars) const;
  // Adds `delta` into the gradient buffer of v if it requires one.
  void accumulate(Var v, const Tensor& delta);
  Tensor& grad_buffer(Var v);

  std::vector<Node> nodes_;
  uint64_t relu_pattern_ = 0xcbf29ce484222325ULL;
};

// Row-wise softmax with max subtraction.
Tensor softmax_rows(const Tensor& logits);

}  // namespace srnn
