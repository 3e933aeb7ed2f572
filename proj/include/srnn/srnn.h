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

#ifndef SRNN_SRNN_H_
#define SRNN_SRNN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SRNN_BUILDING_LIBRARY)
#define SRNN_API __declspec(dllexport)
#else
#define SRNN_API __declspec(dllimport)
#endif
#else
#define SRNN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srnn_status {
  SRNN_OK = 0,
  SRNN_INVALID_ARGUMENT = 1,
  SRNN_NOT_FOUND = 2,
  SRNN_IO_ERROR = 3,
  SRNN_FORMAT_ERROR = 4,
  SRNN_UNSUPPORTED = 5,
  SRNN_NUMERIC_ERROR = 6,
  SRNN_BUFFER_TOO_SMALL = 7,
  SRNN_INTERNAL_ERROR = 8,
} srnn_status;

typedef struct srnn_config srnn_config;
typedef struct srnn_clip srnn_clip;
typedef struct srnn_model srnn_model;
typedef struct srnn_markov srnn_markov;

SRNN_API const char* srnn_version(void);
SRNN_API const char* srnn_status_name(srnn_status status);

/* Message and pipeline stage of the last failed call on this thread. Both are
 * empty strings after a successful call. */
SRNN_API const char* srnn_last_error(void);
SRNN_API const char* srnn_last_error_stage(void);

/* Nonzero when the status reflects bad caller input (invalid argument or a
 * missing file) rather than a runtime failure. */
SRNN_API int srnn_is_validation_status(srnn_status status);

/* Run configuration. */
SRNN_API srnn_status srnn_config_new(srnn_config** out);
SRNN_API srnn_status srnn_config_load(const char* path, srnn_config** out);
SRNN_API srnn_status srnn_config_set(srnn_config* config, const char* key, const char* value);
/* Makes every relative path setting absolute against base_dir. Paths read
 * by srnn_config_load are already absolute. */
SRNN_API srnn_status srnn_config_resolve_paths(srnn_config* config, const char* base_dir);
/* Writes the resolved `key = value` text. *needed receives the size including
 * the terminating NUL; SRNN_BUFFER_TOO_SMALL if capacity is short. */
SRNN_API srnn_status srnn_config_format(const srnn_config* config, char* buffer,
                                        size_t capacity, size_t* needed);
SRNN_API void srnn_config_free(srnn_config* config);

/* Runs preprocess, train, generate, titles or album. out_dir may be NULL for a
 * timestamped run directory under output_dir. The run directory path and any
 * newline-separated warnings are written to the buffers, which may be NULL. */
SRNN_API srnn_status srnn_run_command(const char* command, const srnn_config* config,
                                      const char* out_dir, char* run_dir, size_t run_dir_capacity,
                                      char* warnings, size_t warnings_capacity);

/* Audio. */
SRNN_API srnn_status srnn_clip_load(const char* path, srnn_clip** out);
SRNN_API srnn_status srnn_clip_new(const double* samples, size_t count, uint32_t sample_rate,
                                   srnn_clip** out);
SRNN_API srnn_status srnn_clip_save(const srnn_clip* clip, const char* path);
SRNN_API size_t srnn_clip_size(const srnn_clip* clip);
SRNN_API uint32_t srnn_clip_sample_rate(const srnn_clip* clip);
SRNN_API const double* srnn_clip_samples(const srnn_clip* clip);
SRNN_API void srnn_clip_free(srnn_clip* clip);

SRNN_API double srnn_pcm16_to_float(int16_t value);
SRNN_API int16_t srnn_float_to_pcm16(double value);
SRNN_API int srnn_quantize(double x, int q_levels);
SRNN_API srnn_status srnn_dequantize(int level, int q_levels, double* out);

/* Model checkpoints. */
SRNN_API srnn_status srnn_model_load(const char* checkpoint_path, srnn_model** out);
SRNN_API uint64_t srnn_model_parameter_count(const srnn_model* model);
SRNN_API uint32_t srnn_model_sample_rate(const srnn_model* model);
SRNN_API srnn_status srnn_model_generate(const srnn_model* model, size_t n_samples,
                                         double temperature, uint64_t seed, double h0_sigma,
                                         srnn_clip** out);
SRNN_API void srnn_model_free(srnn_model* model);

/* Title chains. */
SRNN_API srnn_status srnn_markov_load(const char* corpus_path, int order, srnn_markov** out);
SRNN_API srnn_status srnn_markov_generate(const srnn_markov* markov, uint64_t* rng_state,
                                          size_t max_tokens, char* buffer, size_t capacity,
                                          size_t* needed);
SRNN_API int srnn_markov_is_valid(const srnn_markov* markov, const char* title,
                                  size_t max_tokens);
SRNN_API void srnn_markov_free(srnn_markov* markov);

/* Next splitmix64 output; advances *state. */
SRNN_API uint64_t srnn_splitmix64_next(uint64_t* state);

#ifdef __cplusplus
}
#endif

#endif  // SRNN_SRNN_H_
