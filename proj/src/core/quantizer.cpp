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

#include "core/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace srnn {

int quantize_linear(double x, int levels) {
  if (levels < 2) throw Error(ErrorCode::kInvalidArgument, "quantizer needs at least 2 levels");
  if (std::isnan(x)) x = 0.0;
  const double scaled = (std::clamp(x, -1.0, 1.0) + 1.0) / 2.0 * (levels - 1);
  return std::min(levels - 1, static_cast<int>(std::floor(scaled + 0.5)));
}

double dequantize_linear(int level, int levels) {
  if (levels < 2) throw Error(ErrorCode::kInvalidArgument, "quantizer needs at least 2 levels");
  if (level < 0 || level >= levels) {
    throw Error(ErrorCode::kInvalidArgument, "quantization level " + std::to_string(level) +
                                                 " outside [0, " + std::to_string(levels - 1) +
                                                 "]");
  }
  return 2.0 * level / (levels - 1) - 1.0;
}

std::vector<int> quantize_all(std::span<const double> samples, int levels) {
  std::vector<int> out(samples.size());
  std::transform(samples.begin(), samples.end(), out.begin(),
                 [levels](double x) { return quantize_linear(x, levels); });
  return out;
}

std::vector<double> dequantize_all(std::span<const int> levels_seq, int levels) {
  std::vector<double> out(levels_seq.size());
  std::transform(levels_seq.begin(), levels_seq.end(), out.begin(),
                 [levels](int l) { return dequantize_linear(l, levels); });
  return out;
}

}  // namespace srnn
