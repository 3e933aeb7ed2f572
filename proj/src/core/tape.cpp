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

#include "core/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace srnn {
namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(op) + ": shape mismatch " +
                                                 shape_string(a.shape()) + " vs " +
                                                 shape_string(b.shape()));
  }
}

Tensor transpose(const Tensor& a) {
  const size_t m = a.rows(), n = a.cols();
  Tensor t({n, m});
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) t.data()[j * m + i] = a.data()[i * n + j];
  }
  return t;
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor softmax_rows(const Tensor& logits) {
  Tensor out = logits;
  const size_t n = logits.rows(), q = logits.cols();
  for (size_t r = 0; r < n; ++r) {
    double* row = out.data() + r * q;
    const double mx = *std::max_element(row, row + q);
    double total = 0.0;
    for (size_t j = 0; j < q; ++j) {
      row[j] = std::exp(row[j] - mx);
      total += row[j];
    }
    for (size_t j = 0; j < q; ++j) row[j] /= total;
  }
  return out;
}

Var Tape::push(Tensor value, bool requires_grad, Backward backward) {
  Node node;
  node.owned = std::move(value);
  node.requires_grad = requires_grad;
  if (requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{static_cast<uint32_t>(nodes_.size() - 1)};
}

bool Tape::any_requires_grad(std::initializer_list<Var> vars) const {
  for (Var v : vars) {
    if (nodes_[v.id].requires_grad) return true;
  }
  return false;
}

Var Tape::constant(Tensor value) { return push(std::move(value), false, nullptr); }

Var Tape::constant_ref(const Tensor& value) {
  Node node;
  node.borrowed = &value;
  nodes_.push_back(std::move(node));
  return Var{static_cast<uint32_t>(nodes_.size() - 1)};
}

Var Tape::parameter(const Tensor& value, Tensor* grad_sink) {
  Node node;
  node.borrowed = &value;
  node.requires_grad = true;
  node.grad_sink = grad_sink;
  nodes_.push_back(std::move(node));
  return Var{static_cast<uint32_t>(nodes_.size() - 1)};
}

const Tensor& Tape::value(Var v) const { return nodes_.at(v.id).value(); }

Tensor Tape::grad(Var v) const {
  const Node& node = nodes_.at(v.id);
  if (node.grad.size() == 0) return Tensor(node.value().shape());
  return node.grad;
}

Tensor& Tape::grad_buffer(Var v) {
  Node& node = nodes_[v.id];
  if (node.grad.size() == 0) node.grad = Tensor(node.value().shape());
  return node.grad;
}

void Tape::accumulate(Var v, const Tensor& delta) {
  if (!nodes_[v.id].requires_grad) return;
  Tensor& g = grad_buffer(v);
  double* dst = g.data();
  const double* src = delta.data();
  for (size_t i = 0; i < g.size(); ++i) dst[i] += src[i];
}

void Tape::backward(Var target) {
  if (value(target).size() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "backward target must be a single value");
  }
  for (Node& node : nodes_) node.grad = Tensor();
  if (!nodes_[target.id].requires_grad) return;
  grad_buffer(target)[0] = 1.0;
  for (size_t i = target.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.requires_grad || node.grad.size() == 0) continue;
    if (node.backward) {
      // The closure only touches the buffers of earlier nodes.
      Tensor out_grad = std::move(node.grad);
      node.backward(*this, out_grad);
      node.grad = std::move(out_grad);
    }
  }
  for (Node& node : nodes_) {
    if (node.grad_sink && node.grad.size() != 0) {
      double* dst = node.grad_sink->data();
      for (size_t i = 0; i < node.grad.size(); ++i) dst[i] += node.grad[i];
    }
  }
}

Var Tape::matmul(Var a, Var b) {
  Tensor out = srnn::matmul(value(a), value(b));
  return push(std::move(out), any_requires_grad({a, b}), [a, b](Tape& t, const Tensor& dc) {
    // dA = dC * B^T, dB = A^T * dC
    if (t.requires_grad(a)) t.accumulate(a, matmul_transposed(dc, t.value(b)));
    if (t.requires_grad(b)) t.accumulate(b, srnn::matmul(transpose(t.value(a)), dc));
  });
}

Var Tape::linear(Var x, Var weight) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(weight);
  if (xv.rank() != 2 || wv.rank() != 2 || xv.cols() != wv.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "linear: shape mismatch " +
                                                 shape_string(xv.shape()) + " with weight " +
                                                 shape_string(wv.shape()));
  }
  Tensor out = srnn::matmul(xv, transpose(wv));
  return push(std::move(out), any_requires_grad({x, weight}),
              [x, weight](Tape& t, const Tensor& dy) {
                const Tensor& xv = t.value(x);
                const Tensor& wv = t.value(weight);
                if (t.requires_grad(x)) t.accumulate(x, srnn::matmul(dy, wv));
                if (t.requires_grad(weight)) {
                  Tensor& dw = t.grad_buffer(weight);
                  const size_t n = xv.rows(), in = xv.cols(), out = wv.rows();
                  for (size_t i = 0; i < n; ++i) {
                    const double* xi = xv.data() + i * in;
                    const double* dyi = dy.data() + i * out;
                    for (size_t o = 0; o < out; ++o) {
                      const double d = dyi[o];
                      if (d == 0.0) continue;
                      double* dwo = dw.data() + o * in;
                      for (size_t k = 0; k < in; ++k) dwo[k] += d * xi[k];
                    }
                  }
                }
              });
}

Var Tape::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "add");
  Tensor out = value(a);
  const Tensor& bv = value(b);
  for (size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return push(std::move(out), any_requires_grad({a, b}), [a, b](Tape& t, const Tensor& d) {
    t.accumulate(a, d);
    t.accumulate(b, d);
  });
}

Var Tape::add_bias(Var x, Var bias) {
  const Tensor& bv = value(bias);
  Tensor out = value(x);
  if (bv.rank() != 1 || bv.size() != out.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "add_bias: bias " + shape_string(bv.shape()) +
                                                 " does not match " +
                                                 shape_string(out.shape()));
  }
  const size_t n = out.rows(), c = out.cols();
  for (size_t r = 0; r < n; ++r) {
    for (size_t j = 0; j < c; ++j) out.data()[r * c + j] += bv[j];
  }
  return push(std::move(out), any_requires_grad({x, bias}), [x, bias](Tape& t, const Tensor& d) {
    t.accumulate(x, d);
    if (t.requires_grad(bias)) {
      Tensor& db = t.grad_buffer(bias);
      const size_t c = db.size(), n = d.size() / c;
      for (size_t r = 0; r < n; ++r) {
        for (size_t j = 0; j < c; ++j) db[j] += d.data()[r * c + j];
      }
    }
  });
}

Var Tape::mul(Var a, Var b) {
  require_same_shape(value(a), value(b), "mul");
  Tensor out = value(a);
  const Tensor& bv = value(b);
  for (size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return push(std::move(out), any_requires_grad({a, b}), [a, b](Tape& t, const Tensor& d) {
    if (t.requires_grad(a)) {
      Tensor da = d;
      const Tensor& bv = t.value(b);
      for (size_t i = 0; i < da.size(); ++i) da[i] *= bv[i];
      t.accumulate(a, da);
    }
    if (t.requires_grad(b)) {
      Tensor db = d;
      const Tensor& av = t.value(a);
      for (size_t i = 0; i < db.size(); ++i) db[i] *= av[i];
      t.accumulate(b, db);
    }
  });
}

Var Tape::scale(Var a, double factor) {
  Tensor out = value(a);
  for (double& x : out.values()) x *= factor;
  return push(std::move(out), any_requires_grad({a}), [a, factor](Tape& t, const Tensor& d) {
    Tensor da = d;
    for (double& x : da.values()) x *= factor;
    t.accumulate(a, da);
  });
}

Var Tape::tanh(Var a) {
  Tensor out = value(a);
  for (double& x : out.values()) x = std::tanh(x);
  const Var result{static_cast<uint32_t>(nodes_.size())};
  return push(std::move(out), any_requires_grad({a}), [a, result](Tape& t, const Tensor& d) {
    const Tensor& y = t.value(result);
    Tensor da = d;
    for (size_t i = 0; i < da.size(); ++i) da[i] *= 1.0 - y[i] * y[i];
    t.accumulate(a, da);
  });
}

Var Tape::sigmoid(Var a) {
  Tensor out = value(a);
  for (double& x : out.values()) x = sigmoid_scalar(x);
  const Var result{static_cast<uint32_t>(nodes_.size())};
  return push(std::move(out), any_requires_grad({a}), [a, result](Tape& t, const Tensor& d) {
    const Tensor& y = t.value(result);
    Tensor da = d;
    for (size_t i = 0; i < da.size(); ++i) da[i] *= y[i] * (1.0 - y[i]);
    t.accumulate(a, da);
  });
}

Var Tape::relu(Var a) {
  Tensor out = value(a);
  for (double& x : out.values()) {
    const bool on = x > 0.0;
    relu_pattern_ = (relu_pattern_ ^ (on ? 1u : 2u)) * 0x100000001b3ULL;
    x = on ? x : 0.0;
  }
  return push(std::move(out), any_requires_grad({a}), [a](Tape& t, const Tensor& d) {
    const Tensor& x = t.value(a);
    Tensor da = d;
    for (size_t i = 0; i < da.size(); ++i) {
      if (!(x[i] > 0.0)) da[i] = 0.0;
    }
    t.accumulate(a, da);
  });
}

Var Tape::slice_cols(Var a, size_t begin, size_t end) {
  const Tensor& av = value(a);
  if (av.rank() != 2 || begin >= end || end > av.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "slice_cols out of range");
  }
  const size_t n = av.rows(), c = av.cols(), w = end - begin;
  Tensor out({n, w});
  for (size_t r = 0; r < n; ++r) {
    std::copy_n(av.data() + r * c + begin, w, out.data() + r * w);
  }
  return push(std::move(out), any_requires_grad({a}),
              [a, begin, w](Tape& t, const Tensor& d) {
                Tensor& da = t.grad_buffer(a);
                const size_t n = d.rows(), c = da.cols();
                for (size_t r = 0; r < n; ++r) {
                  double* dst = da.data() + r * c + begin;
                  const double* src = d.data() + r * w;
                  for (size_t j = 0; j < w; ++j) dst[j] += src[j];
                }
              });
}

Var Tape::slice_rows(Var a, size_t begin, size_t end) {
  const Tensor& av = value(a);
  if (av.rank() != 2 || begin >= end || end > av.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "slice_rows out of range");
  }
  const size_t c = av.cols();
  Tensor out({end - begin, c},
             std::vector<double>(av.data() + begin * c, av.data() + end * c));
  return push(std::move(out), any_requires_grad({a}), [a, begin, c](Tape& t, const Tensor& d) {
    Tensor& da = t.grad_buffer(a);
    double* dst = da.data() + begin * c;
    for (size_t i = 0; i < d.size(); ++i) dst[i] += d[i];
  });
}

Var Tape::concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw Error(ErrorCode::kInvalidArgument, "concat_rows: no inputs");
  const size_t c = value(parts[0]).cols();
  size_t rows = 0;
  bool needs_grad = false;
  for (Var p : parts) {
    const Tensor& pv = value(p);
    if (pv.rank() != 2 || pv.cols() != c) {
      throw Error(ErrorCode::kInvalidArgument, "concat_rows: column mismatch");
    }
    rows += pv.rows();
    needs_grad = needs_grad || requires_grad(p);
  }
  std::vector<double> data;
  data.reserve(rows * c);
  for (Var p : parts) {
    const Tensor& pv = value(p);
    data.insert(data.end(), pv.data(), pv.data() + pv.size());
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return push(Tensor({rows, c}, std::move(data)), needs_grad,
              [inputs](Tape& t, const Tensor& d) {
                size_t offset = 0;
                for (Var p : inputs) {
                  const size_t n = t.value(p).size();
                  if (t.requires_grad(p)) {
                    Tensor& dp = t.grad_buffer(p);
                    for (size_t i = 0; i < n; ++i) dp[i] += d[offset + i];
                  }
                  offset += n;
                }
              });
}

Var Tape::reshape(Var a, Shape shape) {
  Tensor out = value(a).reshaped(std::move(shape));
  return push(std::move(out), any_requires_grad({a}), [a](Tape& t, const Tensor& d) {
    Tensor& da = t.grad_buffer(a);
    for (size_t i = 0; i < d.size(); ++i) da[i] += d[i];
  });
}

Var Tape::embed(Var table, std::span<const int> indices, size_t per_row) {
  const Tensor& tv = value(table);
  if (tv.rank() != 2 || per_row == 0 || indices.size() % per_row != 0 || indices.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "embed: bad arguments");
  }
  const size_t vocab = tv.rows(), e = tv.cols(), n = indices.size() / per_row;
  for (int idx : indices) {
    if (idx < 0 || static_cast<size_t>(idx) >= vocab) {
      throw Error(ErrorCode::kInvalidArgument,
                  "embed: index " + std::to_string(idx) + " out of range");
    }
  }
  Tensor out({n, per_row * e});
  for (size_t i = 0; i < indices.size(); ++i) {
    std::copy_n(tv.data() + static_cast<size_t>(indices[i]) * e, e, out.data() + i * e);
  }
  std::vector<int> idx(indices.begin(), indices.end());
  return push(std::move(out), any_requires_grad({table}),
              [table, idx = std::move(idx), e](Tape& t, const Tensor& d) {
                Tensor& dt = t.grad_buffer(table);
                for (size_t i = 0; i < idx.size(); ++i) {
                  double* dst = dt.data() + static_cast<size_t>(idx[i]) * e;
                  const double* src = d.data() + i * e;
                  for (size_t j = 0; j < e; ++j) dst[j] += src[j];
                }
              });
}

Var Tape::weight_norm(Var v, Var g) {
  const Tensor& vv = value(v);
  const Tensor& gv = value(g);
  if (vv.rank() != 2 || gv.rank() != 1 || gv.size() != vv.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "weight_norm: shape mismatch");
  }
  const size_t rows = vv.rows(), cols = vv.cols();
  std::vector<double> norms(rows);
  Tensor out({rows, cols});
  for (size_t r = 0; r < rows; ++r) {
    double sq = 0.0;
    for (double x : vv.row(r)) sq += x * x;
    norms[r] = std::sqrt(sq);
    if (!(norms[r] > 0.0)) {
      throw Error(ErrorCode::kNumeric, "weight_norm: zero-norm row " + std::to_string(r));
    }
    const double s = gv[r] / norms[r];
    for (size_t c = 0; c < cols; ++c) out.at(r, c) = s * vv.at(r, c);
  }
  return push(std::move(out), any_requires_grad({v, g}),
              [v, g, norms = std::move(norms)](Tape& t, const Tensor& dw) {
                const Tensor& vv = t.value(v);
                const Tensor& gv = t.value(g);
                const size_t rows = vv.rows(), cols = vv.cols();
                for (size_t r = 0; r < rows; ++r) {
                  // dot = dw_r . v_r / |v_r|  (= dL/dg_r)
                  double dot = 0.0;
                  for (size_t c = 0; c < cols; ++c) dot += dw.at(r, c) * vv.at(r, c);
                  dot /= norms[r];
                  if (t.requires_grad(g)) t.grad_buffer(g)[r] += dot;
                  if (t.requires_grad(v)) {
                    Tensor& dv = t.grad_buffer(v);
                    const double s = gv[r] / norms[r];
                    const double k = dot / norms[r];
                    for (size_t c = 0; c < cols; ++c) {
                      dv.at(r, c) += s * (dw.at(r, c) - k * vv.at(r, c));
                    }
                  }
                }
              });
}

Var Tape::softmax_cross_entropy(Var logits, std::span<const int> targets) {
  const Tensor& lv = value(logits);
  const size_t n = lv.rows(), q = lv.cols();
  if (lv.rank() != 2 || targets.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "softmax_cross_entropy: target count mismatch");
  }
  for (int tgt : targets) {
    if (tgt < 0 || static_cast<size_t>(tgt) >= q) {
      throw Error(ErrorCode::kInvalidArgument,
                  "softmax_cross_entropy: target " + std::to_string(tgt) + " out of range");
    }
  }
  Tensor probs = softmax_rows(lv);
  double total = 0.0;
  for (size_t r = 0; r < n; ++r) {
    const double* row = lv.data() + r * q;
    const double mx = *std::max_element(row, row + q);
    double sum = 0.0;
    for (size_t j = 0; j < q; ++j) sum += std::exp(row[j] - mx);
    total += mx + std::log(sum) - row[targets[r]];
  }
  std::vector<int> tg(targets.begin(), targets.end());
  return push(Tensor({1}, total / static_cast<double>(n)), any_requires_grad({logits}),
              [logits, probs = std::move(probs), tg = std::move(tg)](Tape& t, const Tensor& d) {
                const size_t n = probs.rows(), q = probs.cols();
                const double s = d[0] / static_cast<double>(n);
                Tensor& dl = t.grad_buffer(logits);
                for (size_t r = 0; r < n; ++r) {
                  for (size_t j = 0; j < q; ++j) {
                    const double onehot = static_cast<int>(j) == tg[r] ? 1.0 : 0.0;
                    dl.data()[r * q + j] += s * (probs.data()[r * q + j] - onehot);
                  }
                }
              });
}

Var Tape::half_sum_squares(Var a) {
  double total = 0.0;
  for (double x : value(a).values()) total += x * x;
  return push(Tensor({1}, 0.5 * total), any_requires_grad({a}), [a](Tape& t, const Tensor& d) {
    Tensor da = t.value(a);
    for (double& x : da.values()) x *= d[0];
    t.accumulate(a, da);
  });
}

Var Tape::sum(Var a) {
  double total = 0.0;
  for (double x : value(a).values()) total += x;
  return push(Tensor({1}, total), any_requires_grad({a}), [a](Tape& t, const Tensor& d) {
    Tensor da(t.value(a).shape(), d[0]);
    t.accumulate(a, da);
  });
}

}  // namespace srnn
