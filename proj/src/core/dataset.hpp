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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "core/audio_io.hpp"

namespace srnn {

// Windowed-RMS silence detector settings.
struct SilenceParams {
  double window_ms = 100.0;
  double threshold_dbfs = -50.0;
  double min_run_ms = 500.0;

  void validate() const;
};

enum class Split { kTrain, kTest, kValid };

const char* split_name(Split split);
// Throws kFormat on anything other than "train", "test" or "valid".
Split parse_split(const std::string& token);

struct ChunkSpan {
  size_t start = 0;
  size_t length = 0;
  friend bool operator==(const ChunkSpan&, const ChunkSpan&) = default;
};

struct ChunkRecord {
  std::string source;
  size_t start = 0;
  size_t length = 0;
  Split split = Split::kTrain;
  friend bool operator==(const ChunkRecord&, const ChunkRecord&) = default;
};

using SplitFractions = std::array<double, 3>;  // train, test, valid

struct DatasetManifest {
  std::vector<ChunkRecord> records;
  uint64_t seed = 0;
  uint32_t sample_rate = 0;
  double chunk_seconds = 0.0;
  SplitFractions fractions{0.88, 0.06, 0.06};

  std::vector<ChunkRecord> split_records(Split split) const;
  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

// Deletes maximal runs of silent windows lasting at least min_run_ms. A
// window is silent when its RMS is below 10^(threshold_dbfs / 20). The
// trailing partial window is judged on the samples it has.
AudioClip remove_silence(const AudioClip& clip, const SilenceParams& params);

// Number of samples in one chunk: round(chunk_seconds * sample_rate).
size_t chunk_length(double chunk_seconds, uint32_t sample_rate);

// Evenly spread n_chunks starts of length C over the clip, hop =
// floor((L - C) / (n_chunks - 1)). When the clip is too short for n_chunks
// distinct starts every possible start is returned. Throws kInvalidArgument
// if the clip is shorter than one chunk.
std::vector<ChunkSpan> chunk(const AudioClip& clip, double chunk_seconds, size_t n_chunks);

// Fisher-Yates over splitmix64(seed) from the back, then floor-sized
// train/test prefixes with the remainder assigned to valid.
DatasetManifest shuffle_split(const std::vector<ChunkSpan>& chunks, const std::string& source,
                              uint64_t seed, const SplitFractions& fractions,
                              uint32_t sample_rate, double chunk_seconds);

// Split sizes under the floor rule.
std::array<size_t, 3> split_counts(size_t n, const SplitFractions& fractions);

// Canonical text form: one header line, then one tab-separated record per line.
std::string format_manifest(const DatasetManifest& manifest);
// Throws kFormat with the offending line number.
DatasetManifest parse_manifest(const std::string& text);

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace srnn
