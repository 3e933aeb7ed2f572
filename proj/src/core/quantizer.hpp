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
#include <vector>

namespace srnn {

// Linear quantization of [-1, 1] onto `levels` evenly spaced buckets.
struct QuantizerConfig {
  int levels = 256;
};

// round((clamp(x) + 1) / 2 * (Q - 1)), ties rounded up.
int quantize_linear(double x, int levels);

// 2 * level / (Q - 1) - 1. Throws kInvalidArgument when level is out of range.
double dequantize_linear(int level, int levels);

std::vector<int> quantize_all(std::span<const double> samples, int levels);
std::vector<double> dequantize_all(std::span<const int> levels_seq, int levels);

}  // namespace srnn
