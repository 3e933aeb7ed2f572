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

#include "core/tensor.hpp"

#include <algorithm>
#include <numeric>

#include "core/error.hpp"

namespace srnn {

size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  for (size_t d : shape_) {
    if (d == 0) throw Error(ErrorCode::kInvalidArgument, "tensor dimensions must be positive");
  }
  data_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (size_t d : shape_) {
    if (d == 0) throw Error(ErrorCode::kInvalidArgument, "tensor dimensions must be positive");
  }
  if (data_.size() != shape_size(shape_)) {
    throw Error(ErrorCode::kInvalidArgument,
                "tensor data length does not match shape " + shape_string(shape_));
  }
}

Tensor Tensor::matrix(size_t rows, size_t cols, std::initializer_list<double> values) {
  return Tensor({rows, cols}, std::vector<double>(values));
}

size_t Tensor::rows() const {
  if (shape_.size() <= 1) return shape_.empty() ? 0 : 1;
  return shape_[0];
}

size_t Tensor::cols() const {
  if (shape_.empty()) return 0;
  return shape_.size() == 1 ? shape_[0] : data_.size() / shape_[0];
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot reshape " + shape_string(shape_) + " to " +
                                                 shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "matmul shape mismatch " + shape_string(a.shape()) +
                                                 " * " + shape_string(b.shape()));
  }
  const size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor c({m, n});
  for (size_t i = 0; i < m; ++i) {
    double* ci = c.data() + i * n;
    for (size_t p = 0; p < k; ++p) {
      const double aip = a.data()[i * k + p];
      const double* bp = b.data() + p * n;
      for (size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
  return c;
}

Tensor matmul_transposed(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "matmul_transposed shape mismatch " +
                                                 shape_string(a.shape()) + " * " +
                                                 shape_string(b.shape()) + "^T");
  }
  const size_t m = a.rows(), k = a.cols(), n = b.rows();
  Tensor c({m, n});
  for (size_t i = 0; i < m; ++i) {
    const double* ai = a.data() + i * k;
    for (size_t j = 0; j < n; ++j) {
      const double* bj = b.data() + j * k;
      double sum = 0.0;
      for (size_t p = 0; p < k; ++p) sum += ai[p] * bj[p];
      c.data()[i * n + j] = sum;
    }
  }
  return c;
}

}  // namespace srnn
