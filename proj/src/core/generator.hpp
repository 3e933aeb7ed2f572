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

#include "core/audio_io.hpp"
#include "core/model.hpp"

namespace srnn {

struct GenParams {
  size_t n_samples = 16000;
  double temperature = 1.0;
  uint64_t seed = 0;
  double h0_sigma = 0.1;

  void validate(const ModelConfig& config) const;
};

// Below this temperature sampling degenerates to argmax.
inline constexpr double kArgmaxTemperature = 1e-6;

// softmax(logits / temperature). For temperature < kArgmaxTemperature the
// result is one-hot on the first maximal logit.
std::vector<double> sampling_distribution(std::span<const double> logits, double temperature);

// Autoregressive synthesis, one sample at a time. The recurrent state starts
// from N(0, h0_sigma^2) draws, the first FS levels are the midpoint level and
// the frame tier refreshes its conditioning at every frame boundary.
AudioClip generate(const ModelState& model, const GenParams& params);

// Same as generate() but returns the quantized levels.
std::vector<int> generate_levels(const ModelState& model, const GenParams& params);

struct BatchRecord {
  std::string file;
  uint64_t seed = 0;
  size_t samples = 0;
  uint32_t sample_rate = 0;
  std::string checkpoint_id;

  double duration_seconds() const {
    return sample_rate ? static_cast<double>(samples) / sample_rate : 0.0;
  }
  friend bool operator==(const BatchRecord&, const BatchRecord&) = default;
};

inline constexpr const char* kBatchIndexName = "index.tsv";

struct BatchOptions {
  size_t n_clips = 1;
  double clip_seconds = 1.0;
  uint64_t base_seed = 0;
  double temperature = 1.0;
  double h0_sigma = 0.1;
  std::string checkpoint_id;
};

// Writes gen_<k>.wav for k in [0, n_clips) using seed base_seed + k, plus
// the tab-separated index file. Returns the index records.
std::vector<BatchRecord> generate_batch(const ModelState& model, const BatchOptions& options,
                                        const std::filesystem::path& out_dir);

std::string format_batch_index(const std::vector<BatchRecord>& records);
// Throws kFormat naming the offending line.
std::vector<BatchRecord> parse_batch_index(const std::string& text);
std::vector<BatchRecord> read_batch_index(const std::filesystem::path& path);

// k distinct records chosen by a seeded Fisher-Yates prefix; selection order
// is track order. Throws kInvalidArgument when k exceeds the batch.
std::vector<BatchRecord> select_random_tracks(const std::vector<BatchRecord>& batch, size_t k,
                                              uint64_t seed);

}  // namespace srnn
