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

/* Exercises the public C interface only. Built as C to keep the header honest. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "srnn/srnn.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_scalars(void) {
  uint64_t state = 0;
  EXPECT(srnn_splitmix64_next(&state) == 0xe220a8397b1dcdafULL);
  EXPECT(srnn_splitmix64_next(&state) == 0x6e789e6aa1b965f4ULL);
  EXPECT(srnn_float_to_pcm16(0.5) == 16384);
  EXPECT(srnn_float_to_pcm16(-2.0) == -32767);
  EXPECT(srnn_pcm16_to_float(-32768) == -1.0);
  EXPECT(srnn_quantize(1.0, 256) == 255);
  EXPECT(srnn_quantize(0.0, 1) == -1);
  double x = 0.0;
  EXPECT(srnn_dequantize(0, 256, &x) == SRNN_OK && x == -1.0);
  EXPECT(srnn_dequantize(256, 256, &x) == SRNN_INVALID_ARGUMENT);
  EXPECT(strlen(srnn_last_error()) > 0);
  EXPECT(strcmp(srnn_status_name(SRNN_NOT_FOUND), "not found") == 0);
  EXPECT(strcmp(srnn_status_name((srnn_status)99), "unknown status") == 0);
  EXPECT(srnn_is_validation_status(SRNN_INVALID_ARGUMENT));
  EXPECT(srnn_is_validation_status(SRNN_NOT_FOUND));
  EXPECT(!srnn_is_validation_status(SRNN_IO_ERROR));
  EXPECT(strlen(srnn_version()) > 0);
}

static void test_clips(const char* dir) {
  char path[1024];
  snprintf(path, sizeof path, "%s/capi_clip.wav", dir);
  const double samples[4] = {0.0, 0.25, -1.0, 1.0};
  srnn_clip* clip = NULL;
  EXPECT(srnn_clip_new(samples, 4, 8000, &clip) == SRNN_OK);
  EXPECT(srnn_clip_save(clip, path) == SRNN_OK);
  srnn_clip* back = NULL;
  EXPECT(srnn_clip_load(path, &back) == SRNN_OK);
  EXPECT(srnn_clip_size(back) == 4);
  EXPECT(srnn_clip_sample_rate(back) == 8000);
  for (size_t i = 0; i < 4; ++i) {
    EXPECT(fabs(srnn_clip_samples(back)[i] - samples[i]) <= 1.0 / 32767);
  }
  srnn_clip_free(back);
  srnn_clip_free(clip);

  const double loud[1] = {1.5};
  clip = NULL;
  EXPECT(srnn_clip_new(loud, 1, 8000, &clip) == SRNN_INVALID_ARGUMENT);
  EXPECT(clip == NULL);
  snprintf(path, sizeof path, "%s/missing.wav", dir);
  EXPECT(srnn_clip_load(path, &back) == SRNN_NOT_FOUND);
  EXPECT(srnn_clip_load(NULL, &back) == SRNN_INVALID_ARGUMENT);
}

static void test_config(const char* dir) {
  srnn_config* config = NULL;
  EXPECT(srnn_config_new(&config) == SRNN_OK);
  EXPECT(srnn_config_set(config, "model.hidden_dim", "32") == SRNN_OK);
  EXPECT(srnn_config_set(config, "model.hiden_dim", "32") == SRNN_INVALID_ARGUMENT);
  EXPECT(srnn_config_set(config, "train.manifest", "m/manifest.tsv") == SRNN_OK);
  EXPECT(srnn_config_resolve_paths(config, "/base") == SRNN_OK);
  size_t needed = 0;
  char tiny[4];
  EXPECT(srnn_config_format(config, tiny, sizeof tiny, &needed) == SRNN_BUFFER_TOO_SMALL);
  char* text = malloc(needed);
  EXPECT(srnn_config_format(config, text, needed, &needed) == SRNN_OK);
  EXPECT(strstr(text, "model.hidden_dim = 32\n") != NULL);
  EXPECT(strstr(text, "train.manifest = /base/m/manifest.tsv\n") != NULL);
  free(text);

  char out[1024];
  snprintf(out, sizeof out, "%s/capi_gen", dir);
  EXPECT(srnn_run_command("generate", config, out, NULL, 0, NULL, 0) == SRNN_INVALID_ARGUMENT);
  EXPECT(strcmp(srnn_last_error_stage(), "checkpoint") == 0);
  EXPECT(srnn_config_set(config, "corpus.paths", "/nonexistent/a.wav") == SRNN_OK);
  EXPECT(srnn_run_command("preprocess", config, out, NULL, 0, NULL, 0) == SRNN_NOT_FOUND);
  EXPECT(strcmp(srnn_last_error_stage(), "ingest") == 0);
  EXPECT(srnn_run_command("remix", config, out, NULL, 0, NULL, 0) == SRNN_INVALID_ARGUMENT);
  srnn_config_free(config);
}

static void test_markov(const char* data_dir) {
  char path[1024];
  snprintf(path, sizeof path, "%s/titles.txt", data_dir);
  srnn_markov* markov = NULL;
  EXPECT(srnn_markov_load(path, 4, &markov) == SRNN_INVALID_ARGUMENT);
  EXPECT(srnn_markov_load(path, 2, &markov) == SRNN_OK);
  uint64_t rng = 11;
  char title[256];
  size_t needed = 0;
  for (int i = 0; i < 100; ++i) {
    EXPECT(srnn_markov_generate(markov, &rng, 12, title, sizeof title, &needed) == SRNN_OK);
    EXPECT(srnn_markov_is_valid(markov, title, 12) == 1);
  }
  EXPECT(srnn_markov_is_valid(markov, "Basement Basement Basement", 12) == 0);
  srnn_markov_free(markov);
}

int main(int argc, char** argv) {
  if (argc != 3) {
    fprintf(stderr, "usage: %s <scratch dir> <data dir>\n", argv[0]);
    return 2;
  }
  test_scalars();
  test_clips(argv[1]);
  test_config(argv[1]);
  test_markov(argv[2]);
  srnn_model* model = NULL;
  EXPECT(srnn_model_load("/nonexistent.ckpt", &model) == SRNN_NOT_FOUND);
  if (failures) {
    fprintf(stderr, "%d expectation(s) failed\n", failures);
    return 1;
  }
  printf("c api: all checks passed\n");
  return 0;
}
