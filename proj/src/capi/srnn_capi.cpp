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

#include "srnn/srnn.h"

#include <cstring>
#include <new>
#include <string>

#include "core/audio_io.hpp"
#include "core/checkpoint.hpp"
#include "core/config.hpp"
#include "core/error.hpp"
#include "core/generator.hpp"
#include "core/pipeline.hpp"
#include "core/quantizer.hpp"
#include "core/titlegen.hpp"

struct srnn_config {
  srnn::RunConfig value;
};
struct srnn_clip {
  srnn::AudioClip value;
};
struct srnn_model {
  srnn::ModelState value;
};
struct srnn_markov {
  srnn::MarkovModel value;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_stage;

srnn_status to_status(srnn::ErrorCode code) {
  switch (code) {
    case srnn::ErrorCode::kInvalidArgument: return SRNN_INVALID_ARGUMENT;
    case srnn::ErrorCode::kNotFound: return SRNN_NOT_FOUND;
    case srnn::ErrorCode::kIo: return SRNN_IO_ERROR;
    case srnn::ErrorCode::kFormat: return SRNN_FORMAT_ERROR;
    case srnn::ErrorCode::kUnsupported: return SRNN_UNSUPPORTED;
    case srnn::ErrorCode::kNumeric: return SRNN_NUMERIC_ERROR;
    case srnn::ErrorCode::kInternal: return SRNN_INTERNAL_ERROR;
  }
  return SRNN_INTERNAL_ERROR;
}

srnn_status fail(srnn_status status, std::string message, std::string stage = {}) {
  g_error = std::move(message);
  g_stage = std::move(stage);
  return status;
}

template <typename F>
srnn_status guarded(F&& body) {
  g_error.clear();
  g_stage.clear();
  try {
    return body();
  } catch (const srnn::Error& e) {
    return fail(to_status(e.code()), e.what(), e.stage());
  } catch (const std::bad_alloc&) {
    return fail(SRNN_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(SRNN_INTERNAL_ERROR, e.what());
  }
}

srnn_status null_argument(const char* name) {
  return fail(SRNN_INVALID_ARGUMENT, std::string(name) + " is NULL");
}

srnn_status copy_out(const std::string& text, char* buffer, size_t capacity, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buffer) return SRNN_OK;
  if (capacity < text.size() + 1) {
    if (capacity) buffer[0] = '\0';
    return fail(SRNN_BUFFER_TOO_SMALL, "buffer needs " + std::to_string(text.size() + 1) + " bytes");
  }
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return SRNN_OK;
}

}  // namespace

extern "C" {

const char* srnn_version(void) { return "0.1.0"; }

const char* srnn_status_name(srnn_status status) {
  switch (status) {
    case SRNN_OK: return "ok";
    case SRNN_INVALID_ARGUMENT: return "invalid argument";
    case SRNN_NOT_FOUND: return "not found";
    case SRNN_IO_ERROR: return "i/o error";
    case SRNN_FORMAT_ERROR: return "format error";
    case SRNN_UNSUPPORTED: return "unsupported";
    case SRNN_NUMERIC_ERROR: return "numeric error";
    case SRNN_BUFFER_TOO_SMALL: return "buffer too small";
    case SRNN_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

const char* srnn_last_error(void) { return g_error.c_str(); }
const char* srnn_last_error_stage(void) { return g_stage.c_str(); }

int srnn_is_validation_status(srnn_status status) {
  return status == SRNN_INVALID_ARGUMENT || status == SRNN_NOT_FOUND;
}

srnn_status srnn_config_new(srnn_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new srnn_config{};
    return SRNN_OK;
  });
}

srnn_status srnn_config_load(const char* path, srnn_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new srnn_config{srnn::load_run_config(path)};
    return SRNN_OK;
  });
}

srnn_status srnn_config_set(srnn_config* config, const char* key, const char* value) {
  if (!config) return null_argument("config");
  if (!key) return null_argument("key");
  if (!value) return null_argument("value");
  return guarded([&] {
    srnn::apply_setting(config->value, key, value);
    return SRNN_OK;
  });
}

srnn_status srnn_config_resolve_paths(srnn_config* config, const char* base_dir) {
  if (!config) return null_argument("config");
  if (!base_dir) return null_argument("base_dir");
  return guarded([&] {
    srnn::resolve_paths(config->value, base_dir);
    return SRNN_OK;
  });
}

srnn_status srnn_config_format(const srnn_config* config, char* buffer, size_t capacity,
                               size_t* needed) {
  if (!config) return null_argument("config");
  return guarded([&] {
    return copy_out(srnn::format_run_config(config->value), buffer, capacity, needed);
  });
}

void srnn_config_free(srnn_config* config) { delete config; }

srnn_status srnn_run_command(const char* command, const srnn_config* config, const char* out_dir,
                             char* run_dir, size_t run_dir_capacity, char* warnings,
                             size_t warnings_capacity) {
  if (!command) return null_argument("command");
  if (!config) return null_argument("config");
  return guarded([&] {
    const srnn::CommandResult result =
        srnn::run_command(command, config->value, out_dir ? out_dir : "");
    std::string joined;
    for (const auto& w : result.warnings) joined += w + "\n";
    srnn_status status = copy_out(result.run_dir.string(), run_dir, run_dir_capacity, nullptr);
    if (status != SRNN_OK) return status;
    return copy_out(joined, warnings, warnings_capacity, nullptr);
  });
}

srnn_status srnn_clip_load(const char* path, srnn_clip** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new srnn_clip{srnn::load_wav(path)};
    return SRNN_OK;
  });
}

srnn_status srnn_clip_new(const double* samples, size_t count, uint32_t sample_rate,
                          srnn_clip** out) {
  if (!samples && count) return null_argument("samples");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new srnn_clip{srnn::AudioClip(std::vector<double>(samples, samples + count),
                                         sample_rate)};
    return SRNN_OK;
  });
}

srnn_status srnn_clip_save(const srnn_clip* clip, const char* path) {
  if (!clip) return null_argument("clip");
  if (!path) return null_argument("path");
  return guarded([&] {
    srnn::save_wav(clip->value, path);
    return SRNN_OK;
  });
}

size_t srnn_clip_size(const srnn_clip* clip) { return clip ? clip->value.size() : 0; }
uint32_t srnn_clip_sample_rate(const srnn_clip* clip) {
  return clip ? clip->value.sample_rate() : 0;
}
const double* srnn_clip_samples(const srnn_clip* clip) {
  return clip ? clip->value.samples().data() : nullptr;
}
void srnn_clip_free(srnn_clip* clip) { delete clip; }

double srnn_pcm16_to_float(int16_t value) { return srnn::pcm16_to_float(value); }
int16_t srnn_float_to_pcm16(double value) { return srnn::float_to_pcm16(value); }

int srnn_quantize(double x, int q_levels) {
  if (q_levels < 2) return -1;
  return srnn::quantize_linear(x, q_levels);
}

srnn_status srnn_dequantize(int level, int q_levels, double* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = srnn::dequantize_linear(level, q_levels);
    return SRNN_OK;
  });
}

srnn_status srnn_model_load(const char* checkpoint_path, srnn_model** out) {
  if (!checkpoint_path) return null_argument("checkpoint_path");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new srnn_model{srnn::load_checkpoint(checkpoint_path).model};
    return SRNN_OK;
  });
}

uint64_t srnn_model_parameter_count(const srnn_model* model) {
  return model ? model->value.scalar_count() : 0;
}

uint32_t srnn_model_sample_rate(const srnn_model* model) {
  return model ? model->value.config.sample_rate : 0;
}

srnn_status srnn_model_generate(const srnn_model* model, size_t n_samples, double temperature,
                                uint64_t seed, double h0_sigma, srnn_clip** out) {
  if (!model) return null_argument("model");
  if (!out) return null_argument("out");
  return guarded([&] {
    srnn::GenParams params;
    params.n_samples = n_samples;
    params.temperature = temperature;
    params.seed = seed;
    params.h0_sigma = h0_sigma;
    *out = new srnn_clip{srnn::generate(model->value, params)};
    return SRNN_OK;
  });
}

void srnn_model_free(srnn_model* model) { delete model; }

srnn_status srnn_markov_load(const char* corpus_path, int order, srnn_markov** out) {
  if (!corpus_path) return null_argument("corpus_path");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new srnn_markov{srnn::build_markov(srnn::TitleCorpus::load(corpus_path), order)};
    return SRNN_OK;
  });
}

srnn_status srnn_markov_generate(const srnn_markov* markov, uint64_t* rng_state,
                                 size_t max_tokens, char* buffer, size_t capacity,
                                 size_t* needed) {
  if (!markov) return null_argument("markov");
  if (!rng_state) return null_argument("rng_state");
  return guarded([&] {
    srnn::Rng rng(*rng_state);
    const std::string title = srnn::generate_title(markov->value, rng, max_tokens);
    *rng_state = rng.state();
    return copy_out(title, buffer, capacity, needed);
  });
}

int srnn_markov_is_valid(const srnn_markov* markov, const char* title, size_t max_tokens) {
  if (!markov || !title) return 0;
  return srnn::is_markov_valid(markov->value, title, max_tokens) ? 1 : 0;
}

void srnn_markov_free(srnn_markov* markov) { delete markov; }

uint64_t srnn_splitmix64_next(uint64_t* state) {
  if (!state) return 0;
  srnn::Rng rng(*state);
  const uint64_t out = rng.next();
  *state = rng.state();
  return out;
}

}  // extern "C"
