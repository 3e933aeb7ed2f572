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
#include <string>
#include <string_view>
#include <vector>

#include "core/dataset.hpp"
#include "core/model.hpp"
#include "core/trainer.hpp"

namespace srnn {

// Stage indices for per-stage seed derivation.
enum class Stage : uint64_t { kPreprocess = 0, kTrain = 1, kGenerate = 2, kTitles = 3, kAlbum = 4 };

struct GenerateSettings {
  std::string checkpoint;
  size_t n_clips = 5;
  double clip_seconds = 3.0;
  double temperature = 1.0;
  double h0_sigma = 0.1;
};

struct TitleSettings {
  int order = 2;
  size_t count = 20;
  bool dedupe = false;
  size_t max_tokens = 12;
};

struct AlbumSettings {
  size_t tracks = 3;
  std::string batch_index;  // index.tsv of a generate run
  std::string titles;       // titles.txt of a titles run; empty: generate fresh titles
};

// Everything a command needs. Paths are stored as given; load_run_config
// resolves relative ones against the config file's directory.
struct RunConfig {
  std::vector<std::string> corpus_paths;
  std::string corpus_titles;
  uint64_t seed = 0;
  std::string output_dir = "runs";

  SilenceParams silence;
  double chunk_seconds = 8.0;
  size_t n_chunks = 3200;
  SplitFractions fractions{0.88, 0.06, 0.06};

  ModelConfig model;
  TrainConfig train;  // train.seed is derived, not read
  std::string train_manifest;
  std::string train_resume;

  GenerateSettings generate;
  TitleSettings titles;
  AlbumSettings album;

  // Throws kInvalidArgument naming the first offending key.
  void validate() const;

  uint64_t stage_seed(Stage stage) const;
};

// Applies one `key = value` setting. Throws kInvalidArgument for unknown
// keys and unparsable values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

// Parses config text on top of the defaults. Errors name the line.
RunConfig parse_run_config(std::string_view text);

// Reads a config file and makes every relative path absolute against the
// file's directory.
RunConfig load_run_config(const std::filesystem::path& path);

void resolve_paths(RunConfig& config, const std::filesystem::path& base_dir);

// Every key with its current value, one per line, in a fixed order. Parsing
// the result yields an equal config.
std::string format_run_config(const RunConfig& config);

// Sorted list of every accepted key.
std::vector<std::string> run_config_keys();

}  // namespace srnn
