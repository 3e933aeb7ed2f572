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

// Command-line front end. Talks to the library only through srnn/srnn.h.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "srnn/srnn.h"

namespace {

struct Options {
  std::string config;
  std::string seed;
  std::string checkpoint;
  std::string out;
  std::vector<std::string> sets;
};

int report(srnn_status status, const char* command) {
  const std::string stage = srnn_last_error_stage();
  if (stage.empty()) {
    std::fprintf(stderr, "srnn %s: %s (%s)\n", command, srnn_last_error(),
                 srnn_status_name(status));
  } else {
    std::fprintf(stderr, "srnn %s: stage %s failed: %s\n", command, stage.c_str(),
                 srnn_last_error());
  }
  return srnn_is_validation_status(status) ? 2 : 1;
}

int run(const std::string& command, const Options& opt) {
  srnn_config* config = nullptr;
  srnn_status status = srnn_config_load(opt.config.c_str(), &config);
  if (status != SRNN_OK) return report(status, command.c_str());

  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& s : opt.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "srnn %s: --set expects key=value, got '%s'\n", command.c_str(),
                   s.c_str());
      srnn_config_free(config);
      return 2;
    }
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (!opt.seed.empty()) overrides.emplace_back("seed", opt.seed);
  if (!opt.checkpoint.empty()) {
    overrides.emplace_back(command == "train" ? "train.resume" : "generate.checkpoint",
                           opt.checkpoint);
  }
  for (auto& [key, value] : overrides) {
    // Trim spaces around '=' in --set arguments.
    const auto strip = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
    };
    strip(key);
    strip(value);
    status = srnn_config_set(config, key.c_str(), value.c_str());
    if (status != SRNN_OK) {
      srnn_config_free(config);
      return report(status, command.c_str());
    }
  }
  // Overrides name paths relative to where the command was typed.
  status = srnn_config_resolve_paths(config, std::filesystem::current_path().c_str());
  if (status != SRNN_OK) {
    srnn_config_free(config);
    return report(status, command.c_str());
  }

  std::vector<char> run_dir(4096), warnings(16384);
  status = srnn_run_command(command.c_str(), config, opt.out.empty() ? nullptr : opt.out.c_str(),
                            run_dir.data(), run_dir.size(), warnings.data(), warnings.size());
  srnn_config_free(config);
  if (status != SRNN_OK) return report(status, command.c_str());
  if (warnings[0]) std::fprintf(stderr, "warning: %s", warnings.data());
  std::printf("%s\n", run_dir.data());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-tier sample-level audio model: preprocess, train, generate, titles, album"};
  app.require_subcommand(1);
  app.set_version_flag("--version", srnn_version());

  Options opt;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"preprocess", "Strip silence, chunk the corpus and write a split manifest"},
      {"train", "Train the model on a manifest (--checkpoint resumes)"},
      {"generate", "Synthesize a batch of clips from a checkpoint"},
      {"titles", "Generate song titles with a word-level Markov chain"},
      {"album", "Pick random clips from a batch and name them with generated titles"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Config file (key = value)")->required();
    sub->add_option("--seed", opt.seed, "Master seed override");
    if (std::string(name) == "train" || std::string(name) == "generate") {
      sub->add_option("--checkpoint", opt.checkpoint, "Checkpoint to resume from / sample with");
    }
    sub->add_option("--out", opt.out, "Exact run directory instead of a timestamped one");
    sub->add_option("--set", opt.sets, "Extra key=value override (repeatable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (CLI::App* sub : app.get_subcommands()) return run(sub->get_name(), opt);
  return 2;
}
