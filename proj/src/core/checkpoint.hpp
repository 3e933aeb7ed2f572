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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/optim.hpp"

namespace srnn {

inline constexpr uint32_t kCheckpointVersion = 1;

// Everything a checkpoint must agree on before training can resume from it.
struct CheckpointConfig {
  ModelConfig model;
  AdamConfig adam;
  uint64_t seed = 0;
};

// Canonical `key = value` text, one setting per line in a fixed order.
std::string canonical_config_text(const CheckpointConfig& config);
CheckpointConfig parse_checkpoint_config(const std::string& text);

struct Checkpoint {
  std::string config_text;
  ModelState model;
  AdamState adam;
  uint64_t rng_state = 0;  // trainer stream at the start of the current epoch
  uint32_t epoch = 0;      // epochs completed
  uint64_t step = 0;       // optimizer steps taken

  // Trailing section: running loss of the current epoch and the recurrent
  // state carried into the next window, so a resume mid-chunk is exact.
  double loss_sum = 0.0;
  uint64_t loss_count = 0;
  RecurrentState carry;

  uint64_t config_hash() const;
};

// Binary layout (all integers little-endian):
//   "SRNNCKPT" | u32 version | u64 len + config text
//   u32 n | n x tensor                      parameters
//   u32 n | n x tensor | u64 t              Adam moments (m then v per param)
//   u64 rng state | u32 epoch | u64 step
//   "CARY" | f64 loss sum | u64 loss count | u32 n | n x tensor
// tensor = u32 name len + name | u32 rank | rank x u32 dim | f64 data
std::vector<uint8_t> encode_checkpoint(const Checkpoint& checkpoint);

// Throws kFormat ("not a checkpoint", truncated data, shape mismatch) or
// kUnsupported (version).
Checkpoint decode_checkpoint(std::span<const uint8_t> bytes);

// Atomic write (temp file + rename).
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace srnn
