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

#include <filesystem>
#include <string>
#include <vector>

#include "core/config.hpp"

namespace srnn {

struct CommandResult {
  std::filesystem::path run_dir;
  std::vector<std::string> warnings;
};

// Every command validates the config, creates its run directory (out_dir if
// given, else <output_dir>/<command>_<UTC timestamp>), writes config.resolved
// there and raises srnn::Error tagged with the failing stage.
//
//   preprocess: album.wav (silence-stripped corpus) + manifest.tsv
//   train:      checkpoints/, previews/, final.ckpt, report.tsv
//   generate:   gen_<k>.wav + index.tsv
//   titles:     titles.txt
//   album:      NN_<title>.wav + tracklist.txt
CommandResult cmd_preprocess(const RunConfig& config, const std::filesystem::path& out_dir = {});
CommandResult cmd_train(const RunConfig& config, const std::filesystem::path& out_dir = {});
CommandResult cmd_generate(const RunConfig& config, const std::filesystem::path& out_dir = {});
CommandResult cmd_titles(const RunConfig& config, const std::filesystem::path& out_dir = {});
CommandResult cmd_album(const RunConfig& config, const std::filesystem::path& out_dir = {});

// Dispatch by name. Throws kInvalidArgument for an unknown command.
CommandResult run_command(const std::string& name, const RunConfig& config,
                          const std::filesystem::path& out_dir = {});

inline constexpr const char* kManifestName = "manifest.tsv";
inline constexpr const char* kCacheName = "album.wav";
inline constexpr const char* kResolvedConfigName = "config.resolved";
inline constexpr const char* kTitlesName = "titles.txt";
inline constexpr const char* kTracklistName = "tracklist.txt";

// Title reduced to a filename-safe form: letters, digits, '-' and '_' kept,
// whitespace runs become '_', everything else dropped.
std::string sanitize_title(const std::string& title);

}  // namespace srnn
