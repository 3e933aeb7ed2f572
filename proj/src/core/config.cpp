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

#include "core/config.hpp"

#include <functional>
#include <limits>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/util.hpp"

namespace srnn {
namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw Error(ErrorCode::kInvalidArgument, "config key " + std::string(key) + ": expected " +
                                               expected + ", got '" + std::string(value) + "'");
}

double to_double(std::string_view key, std::string_view value) {
  const auto v = parse_double(value);
  if (!v) bad_value(key, value, "a number");
  return *v;
}

uint64_t to_u64(std::string_view key, std::string_view value) {
  const auto v = parse_u64(value);
  if (!v) bad_value(key, value, "a non-negative integer");
  return *v;
}

int to_int(std::string_view key, std::string_view value) {
  const auto v = parse_i64(value);
  if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
    bad_value(key, value, "an integer");
  }
  return static_cast<int>(*v);
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "true or false");
}

std::vector<std::string> to_list(std::string_view value) {
  std::vector<std::string> out;
  if (trim(value).empty()) return out;
  for (auto item : split(value, ',')) out.emplace_back(trim(item));
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define SRNN_DOUBLE(KEY, MEMBER)                                                           \
  Field {                                                                                  \
    KEY, [](RunConfig& c, std::string_view v) { c.MEMBER = to_double(KEY, v); },           \
        [](const RunConfig& c) { return format_double(c.MEMBER); }                         \
  }
#define SRNN_INT(KEY, MEMBER)                                                              \
  Field {                                                                                  \
    KEY, [](RunConfig& c, std::string_view v) { c.MEMBER = to_int(KEY, v); },              \
        [](const RunConfig& c) { return std::to_string(c.MEMBER); }                        \
  }
#define SRNN_U64(KEY, MEMBER)                                                              \
  Field {                                                                                  \
    KEY,                                                                                   \
        [](RunConfig& c, std::string_view v) {                                             \
          c.MEMBER = static_cast<decltype(c.MEMBER)>(to_u64(KEY, v));                      \
        },                                                                                 \
        [](const RunConfig& c) { return std::to_string(c.MEMBER); }                        \
  }
#define SRNN_STRING(KEY, MEMBER)                                                           \
  Field {                                                                                  \
    KEY, [](RunConfig& c, std::string_view v) { c.MEMBER = std::string(v); },              \
        [](const RunConfig& c) { return c.MEMBER; }                                        \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"corpus.paths",
            [](RunConfig& c, std::string_view v) { c.corpus_paths = to_list(v); },
            [](const RunConfig& c) { return join_list(c.corpus_paths); }},
      SRNN_STRING("corpus.titles", corpus_titles),
      SRNN_U64("seed", seed),
      SRNN_STRING("output_dir", output_dir),
      SRNN_DOUBLE("silence.window_ms", silence.window_ms),
      SRNN_DOUBLE("silence.threshold_dbfs", silence.threshold_dbfs),
      SRNN_DOUBLE("silence.min_run_ms", silence.min_run_ms),
      SRNN_DOUBLE("dataset.chunk_seconds", chunk_seconds),
      SRNN_U64("dataset.n_chunks", n_chunks),
      Field{"dataset.fractions",
            [](RunConfig& c, std::string_view v) {
              const auto parts = split(v, ',');
              if (parts.size() != 3) bad_value("dataset.fractions", v, "three numbers");
              for (size_t i = 0; i < 3; ++i) {
                c.fractions[i] = to_double("dataset.fractions", trim(parts[i]));
              }
            },
            [](const RunConfig& c) {
              return format_double(c.fractions[0]) + "," + format_double(c.fractions[1]) + "," +
                     format_double(c.fractions[2]);
            }},
      SRNN_INT("model.q_levels", model.q_levels),
      SRNN_INT("model.embed_dim", model.embed_dim),
      SRNN_INT("model.hidden_dim", model.hidden_dim),
      SRNN_INT("model.n_rnn_layers", model.n_rnn_layers),
      SRNN_INT("model.frame_size", model.frame_size),
      SRNN_U64("model.sample_rate", model.sample_rate),
      SRNN_INT("model.tbptt_len", model.tbptt_len),
      SRNN_INT("model.batch_size", model.batch_size),
      SRNN_INT("train.epochs", train.epochs),
      SRNN_U64("train.steps_per_checkpoint", train.steps_per_checkpoint),
      SRNN_U64("train.max_steps", train.max_steps),
      SRNN_DOUBLE("train.preview_seconds", train.preview_seconds),
      SRNN_DOUBLE("train.preview_temperature", train.preview_temperature),
      SRNN_DOUBLE("train.preview_h0_sigma", train.preview_h0_sigma),
      SRNN_DOUBLE("train.lr", train.adam.lr),
      SRNN_DOUBLE("train.beta1", train.adam.beta1),
      SRNN_DOUBLE("train.beta2", train.adam.beta2),
      SRNN_DOUBLE("train.eps", train.adam.eps),
      SRNN_DOUBLE("train.clip_norm", train.adam.clip_norm),
      SRNN_STRING("train.manifest", train_manifest),
      SRNN_STRING("train.resume", train_resume),
      SRNN_STRING("generate.checkpoint", generate.checkpoint),
      SRNN_U64("generate.n_clips", generate.n_clips),
      SRNN_DOUBLE("generate.clip_seconds", generate.clip_seconds),
      SRNN_DOUBLE("generate.temperature", generate.temperature),
      SRNN_DOUBLE("generate.h0_sigma", generate.h0_sigma),
      SRNN_INT("titles.order", titles.order),
      SRNN_U64("titles.count", titles.count),
      Field{"titles.dedupe",
            [](RunConfig& c, std::string_view v) { c.titles.dedupe = to_bool("titles.dedupe", v); },
            [](const RunConfig& c) { return std::string(c.titles.dedupe ? "true" : "false"); }},
      SRNN_U64("titles.max_tokens", titles.max_tokens),
      SRNN_U64("album.tracks", album.tracks),
      SRNN_STRING("album.batch_index", album.batch_index),
      SRNN_STRING("album.titles", album.titles),
  };
  return table;
}

#undef SRNN_DOUBLE
#undef SRNN_INT
#undef SRNN_U64
#undef SRNN_STRING

std::string absolute_from(const std::string& path, const std::filesystem::path& base) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_relative()) p = base / p;
  return p.lexically_normal().string();
}

}  // namespace

void RunConfig::validate() const {
  const auto fail = [](const std::string& key, const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, "config key " + key + ": " + why);
  };
  const auto rethrow_as = [](const char* section, auto&& check) {
    try {
      check();
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string(section) + ": " + e.what());
    }
  };
  rethrow_as("silence", [&] { silence.validate(); });
  if (!(chunk_seconds > 0.0)) fail("dataset.chunk_seconds", "must be > 0");
  if (n_chunks == 0) fail("dataset.n_chunks", "must be >= 1");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) fail("dataset.fractions", "must be non-negative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) fail("dataset.fractions", "must sum to 1");
  rethrow_as("model", [&] { model.validate(); });
  rethrow_as("train", [&] { train.validate(); });
  if (generate.n_clips == 0) fail("generate.n_clips", "must be >= 1");
  if (!(generate.clip_seconds > 0.0)) fail("generate.clip_seconds", "must be > 0");
  if (!(generate.temperature > 0.0)) fail("generate.temperature", "must be > 0");
  if (!(generate.h0_sigma >= 0.0)) fail("generate.h0_sigma", "must be >= 0");
  if (titles.order != 2 && titles.order != 3) fail("titles.order", "must be 2 or 3");
  if (titles.count == 0) fail("titles.count", "must be >= 1");
  if (titles.max_tokens == 0) fail("titles.max_tokens", "must be >= 1");
  if (album.tracks == 0) fail("album.tracks", "must be >= 1");
  if (output_dir.empty()) fail("output_dir", "must not be empty");
}

uint64_t RunConfig::stage_seed(Stage stage) const {
  return splitmix64_once(seed + static_cast<uint64_t>(stage));
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(config, trim(value));
      return;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + std::string(key) + "'");
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig config;
  std::vector<KeyValue> entries;
  try {
    entries = parse_key_values(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("config ") + e.what());
  }
  for (const auto& kv : entries) {
    try {
      apply_setting(config, kv.key, kv.value);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config line " + std::to_string(kv.line) + ": " + e.what());
    }
  }
  return config;
}

void resolve_paths(RunConfig& config, const std::filesystem::path& base_dir) {
  const auto base = std::filesystem::absolute(base_dir);
  for (auto& p : config.corpus_paths) p = absolute_from(p, base);
  config.corpus_titles = absolute_from(config.corpus_titles, base);
  config.output_dir = absolute_from(config.output_dir, base);
  config.train_manifest = absolute_from(config.train_manifest, base);
  config.train_resume = absolute_from(config.train_resume, base);
  config.generate.checkpoint = absolute_from(config.generate.checkpoint, base);
  config.album.batch_index = absolute_from(config.album.batch_index, base);
  config.album.titles = absolute_from(config.album.titles, base);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig config = parse_run_config(read_text_file(path));
  resolve_paths(config, std::filesystem::absolute(path).parent_path());
  return config;
}

std::string format_run_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += '\n';
  }
  return out;
}

std::vector<std::string> run_config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace srnn
