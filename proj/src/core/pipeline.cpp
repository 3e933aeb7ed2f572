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

#include "core/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <system_error>

#include "core/audio_io.hpp"
#include "core/checkpoint.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/generator.hpp"
#include "core/titlegen.hpp"
#include "core/trainer.hpp"
#include "core/util.hpp"

namespace srnn {
namespace fs = std::filesystem;
namespace {

template <typename F>
auto in_stage(const char* stage, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw Error(e.code(), stage, e.what());
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::kIo, stage, e.what());
  } catch (const std::bad_alloc&) {
    throw Error(ErrorCode::kInternal, stage, "out of memory");
  }
}

void require_file(const std::string& path, const char* key) {
  if (path.empty()) throw Error(ErrorCode::kInvalidArgument, std::string(key) + " is not set");
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kNotFound, std::string(key) + ": " + path + " does not exist");
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d_%H%M%S", &tm);
  return buf;
}

fs::path make_run_dir(const RunConfig& config, const std::string& command, const fs::path& out) {
  return in_stage("output", [&] {
    fs::path dir = out;
    if (dir.empty()) {
      const fs::path base = fs::path(config.output_dir) / (command + "_" + utc_timestamp());
      dir = base;
      for (int n = 1; fs::exists(dir); ++n) dir = base.string() + "_" + std::to_string(n);
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      throw Error(ErrorCode::kIo, "cannot create run directory " + dir.string());
    }
    dir = fs::absolute(dir);
    write_file_atomic(dir / kResolvedConfigName, format_run_config(config));
    return dir;
  });
}

void validate_config(const RunConfig& config) {
  in_stage("config", [&] { config.validate(); });
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  const std::string text = read_text_file(path);
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (!line.empty()) lines.emplace_back(line);
  }
  return lines;
}

}  // namespace

std::string sanitize_title(const std::string& title) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : title) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (!(std::isalnum(c) || c == '-' || c == '_')) continue;
    if (pending_space) out += '_';
    pending_space = false;
    out += static_cast<char>(c);
  }
  return out.empty() ? "untitled" : out;
}

CommandResult cmd_preprocess(const RunConfig& config, const fs::path& out_dir) {
  validate_config(config);
  const std::vector<AudioClip> sources = in_stage("ingest", [&] {
    if (config.corpus_paths.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "corpus.paths is empty");
    }
    std::vector<AudioClip> clips;
    for (const auto& path : config.corpus_paths) {
      require_file(path, "corpus.paths");
      AudioClip clip = load_wav(path);
      if (clip.sample_rate() != config.model.sample_rate) {
        throw Error(ErrorCode::kInvalidArgument,
                    path + " has sample rate " + std::to_string(clip.sample_rate()) +
                        ", model.sample_rate is " + std::to_string(config.model.sample_rate));
      }
      clips.push_back(std::move(clip));
    }
    return clips;
  });
  const AudioClip album = in_stage("silence", [&] {
    std::vector<double> joined;
    for (const auto& clip : sources) {
      const AudioClip kept = remove_silence(clip, config.silence);
      joined.insert(joined.end(), kept.samples().begin(), kept.samples().end());
    }
    return AudioClip(std::move(joined), config.model.sample_rate);
  });
  const auto spans = in_stage("chunk", [&] {
    return chunk(album, config.chunk_seconds, config.n_chunks);
  });
  const DatasetManifest manifest = in_stage("split", [&] {
    return shuffle_split(spans, kCacheName, config.stage_seed(Stage::kPreprocess),
                         config.fractions, config.model.sample_rate, config.chunk_seconds);
  });
  CommandResult result{make_run_dir(config, "preprocess", out_dir), {}};
  in_stage("output", [&] {
    save_wav(album, result.run_dir / kCacheName);
    write_manifest(manifest, result.run_dir / kManifestName);
  });
  if (manifest.records.size() < config.n_chunks) {
    result.warnings.push_back("corpus only admits " + std::to_string(manifest.records.size()) +
                              " distinct chunks, fewer than dataset.n_chunks");
  }
  return result;
}

CommandResult cmd_train(const RunConfig& config, const fs::path& out_dir) {
  validate_config(config);
  const DatasetManifest manifest = in_stage("dataset", [&] {
    require_file(config.train_manifest, "train.manifest");
    DatasetManifest m = read_manifest(config.train_manifest);
    if (m.sample_rate != config.model.sample_rate) {
      throw Error(ErrorCode::kInvalidArgument,
                  "manifest sample rate " + std::to_string(m.sample_rate) +
                      " differs from model.sample_rate " +
                      std::to_string(config.model.sample_rate));
    }
    return m;
  });
  const Corpus corpus = in_stage("dataset", [&] {
    return load_corpus(manifest, fs::absolute(config.train_manifest).parent_path());
  });
  TrainConfig train = config.train;
  train.seed = config.stage_seed(Stage::kTrain);

  Trainer trainer = in_stage("train", [&] {
    if (!config.train_resume.empty()) {
      require_file(config.train_resume, "train.resume");
      return Trainer::resume(load_checkpoint(config.train_resume), manifest, corpus, train);
    }
    return Trainer(init_model(config.model, train.seed), manifest, corpus, train);
  });
  CommandResult result{make_run_dir(config, "train", out_dir), {}};
  trainer.set_output_dir(result.run_dir);
  const TrainReport report = in_stage("train", [&] { return trainer.run(); });
  if (!report.finished) {
    result.warnings.push_back("stopped at train.max_steps after " +
                              std::to_string(report.total_steps) + " steps");
  }
  return result;
}

CommandResult cmd_generate(const RunConfig& config, const fs::path& out_dir) {
  validate_config(config);
  const Checkpoint ckpt = in_stage("checkpoint", [&] {
    require_file(config.generate.checkpoint, "generate.checkpoint");
    return load_checkpoint(config.generate.checkpoint);
  });
  BatchOptions options;
  options.n_clips = config.generate.n_clips;
  options.clip_seconds = config.generate.clip_seconds;
  options.base_seed = config.stage_seed(Stage::kGenerate);
  options.temperature = config.generate.temperature;
  options.h0_sigma = config.generate.h0_sigma;
  options.checkpoint_id = hex64(fnv1a64(encode_checkpoint(ckpt)));
  CommandResult result{make_run_dir(config, "generate", out_dir), {}};
  in_stage("generate", [&] { generate_batch(ckpt.model, options, result.run_dir); });
  return result;
}

CommandResult cmd_titles(const RunConfig& config, const fs::path& out_dir) {
  validate_config(config);
  const TitleCorpus corpus = in_stage("titles", [&] {
    require_file(config.corpus_titles, "corpus.titles");
    return TitleCorpus::load(config.corpus_titles);
  });
  const MarkovModel model = in_stage("titles", [&] {
    return build_markov(corpus, config.titles.order);
  });
  Rng rng(config.stage_seed(Stage::kTitles));
  const TitleBatch batch = generate_titles(model, config.titles.count, config.titles.dedupe,
                                           corpus, rng, config.titles.max_tokens);
  CommandResult result{make_run_dir(config, "titles", out_dir), {}};
  std::string text;
  for (const auto& t : batch.titles) text += t + "\n";
  in_stage("output", [&] { write_file_atomic(result.run_dir / kTitlesName, text); });
  if (batch.warnings) {
    result.warnings.push_back(std::to_string(batch.warnings) +
                              " titles could not be produced within the retry budget");
  }
  return result;
}

CommandResult cmd_album(const RunConfig& config, const fs::path& out_dir) {
  validate_config(config);
  const size_t k = config.album.tracks;
  const auto tracks = in_stage("album", [&] {
    require_file(config.album.batch_index, "album.batch_index");
    return select_random_tracks(read_batch_index(config.album.batch_index), k,
                                config.stage_seed(Stage::kAlbum));
  });
  Rng rng(splitmix64_once(config.stage_seed(Stage::kAlbum)));
  const std::vector<std::string> titles = in_stage("titles", [&] {
    if (!config.album.titles.empty()) {
      require_file(config.album.titles, "album.titles");
      std::vector<std::string> pool = read_lines(config.album.titles);
      if (pool.size() < k) {
        throw Error(ErrorCode::kInvalidArgument,
                    "album.titles has " + std::to_string(pool.size()) + " titles, need " +
                        std::to_string(k));
      }
      for (size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
      pool.resize(k);
      return pool;
    }
    require_file(config.corpus_titles, "corpus.titles");
    const TitleCorpus corpus = TitleCorpus::load(config.corpus_titles);
    const MarkovModel model = build_markov(corpus, config.titles.order);
    TitleBatch batch =
        generate_titles(model, k, config.titles.dedupe, corpus, rng, config.titles.max_tokens);
    if (batch.titles.size() < k) {
      throw Error(ErrorCode::kInvalidArgument, "title chain produced only " +
                                                   std::to_string(batch.titles.size()) +
                                                   " usable titles, need " + std::to_string(k));
    }
    return batch.titles;
  });

  CommandResult result{make_run_dir(config, "album", out_dir), {}};
  in_stage("album", [&] {
    const fs::path batch_dir = fs::path(config.album.batch_index).parent_path();
    std::string tracklist;
    for (size_t i = 0; i < k; ++i) {
      char number[8];
      std::snprintf(number, sizeof number, "%02zu", i + 1);
      const std::string name = std::string(number) + "_" + sanitize_title(titles[i]) + ".wav";
      const fs::path source = batch_dir / tracks[i].file;
      require_file(source.string(), "batch clip");
      write_file_atomic(result.run_dir / name, read_binary_file(source));
      tracklist += std::string(number) + '\t' + titles[i] + '\t' + name + '\t' + tracks[i].file +
                   '\t' + format_double(tracks[i].duration_seconds()) + '\n';
    }
    write_file_atomic(result.run_dir / kTracklistName, tracklist);
  });
  return result;
}

CommandResult run_command(const std::string& name, const RunConfig& config,
                          const fs::path& out_dir) {
  if (name == "preprocess") return cmd_preprocess(config, out_dir);
  if (name == "train") return cmd_train(config, out_dir);
  if (name == "generate") return cmd_generate(config, out_dir);
  if (name == "titles") return cmd_titles(config, out_dir);
  if (name == "album") return cmd_album(config, out_dir);
  throw Error(ErrorCode::kInvalidArgument, "cli", "unknown command '" + name + "'");
}

}  // namespace srnn
