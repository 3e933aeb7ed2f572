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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/audio_io.hpp"
#include "core/checkpoint.hpp"
#include "core/dataset.hpp"
#include "core/model.hpp"
#include "core/optim.hpp"
#include "core/rng.hpp"

namespace srnn {

struct TrainConfig {
  int epochs = 1;
  uint64_t steps_per_checkpoint = 0;  // 0: checkpoint at epoch ends only
  uint64_t max_steps = 0;             // 0: no limit
  double preview_seconds = 10.0;      // 0: no preview clips
  double preview_temperature = 1.0;
  double preview_h0_sigma = 0.1;
  AdamConfig adam;
  uint64_t seed = 0;

  void validate() const;
};

struct EpochStats {
  uint32_t epoch = 0;
  uint64_t steps = 0;         // global step count at the end of the epoch
  double train_bits = 0.0;    // mean over the epoch's windows
  std::optional<double> valid_bits;

  friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  uint64_t total_steps = 0;
  bool finished = false;      // false when stopped by max_steps
  double wall_seconds = 0.0;  // not part of equality

  bool operator==(const TrainReport& other) const {
    return epochs == other.epochs && total_steps == other.total_steps &&
           finished == other.finished;
  }
};

// Audio referenced by a manifest, keyed by record source.
using Corpus = std::map<std::string, AudioClip>;

// Loads every distinct source of the manifest, resolving relative paths
// against base_dir.
Corpus load_corpus(const DatasetManifest& manifest, const std::filesystem::path& base_dir);

// Teacher-forced mean negative log2-likelihood per predicted sample over one
// split. Each chunk starts from a zero state and carries it across windows.
double evaluate(const ModelState& model, const DatasetManifest& manifest, Split split,
                const Corpus& corpus);

// Truncated-BPTT training over the train split. Batches of chunks are
// consumed window by window with the recurrent state carried across windows
// of a chunk and zeroed between chunks.
class Trainer {
 public:
  Trainer(ModelState model, const DatasetManifest& manifest, const Corpus& corpus,
          TrainConfig config);

  // Continues from a checkpoint. Throws kInvalidArgument when the
  // checkpoint's config hash differs from the one `config` and the model
  // config would produce.
  static Trainer resume(const Checkpoint& checkpoint, const DatasetManifest& manifest,
                        const Corpus& corpus, TrainConfig config);

  // Directory for checkpoints/, previews/ and report.tsv. Empty: no files.
  void set_output_dir(std::filesystem::path dir) { out_dir_ = std::move(dir); }

  TrainReport run();

  // One optimizer step on the next window in schedule order.
  double step_once();

  const ModelState& model() const { return model_; }
  const AdamState& optimizer() const { return adam_; }
  uint64_t steps_taken() const { return step_; }
  uint64_t steps_per_epoch() const { return steps_per_epoch_; }
  size_t windows_per_chunk() const { return windows_per_chunk_; }
  Checkpoint checkpoint() const;
  std::string config_text() const;

  // Path of the last checkpoint written, empty if none.
  const std::filesystem::path& last_checkpoint() const { return last_checkpoint_; }

 private:
  struct Position {
    size_t batch = 0;
    size_t window = 0;
  };

  void prepare(const DatasetManifest& manifest, const Corpus& corpus);
  void draw_epoch_order();
  Position position() const;
  double train_window(const Position& pos);
  void write_checkpoint(bool with_preview);
  void finish_epoch(TrainReport& report);

  ModelState model_;
  TrainConfig config_;
  AdamState adam_;
  Rng rng_;
  uint64_t epoch_start_rng_ = 0;
  uint32_t epoch_ = 0;
  uint64_t step_ = 0;
  double loss_sum_ = 0.0;
  uint64_t loss_count_ = 0;
  RecurrentState carry_;

  std::vector<std::vector<int>> chunks_;  // quantized train chunks
  std::vector<size_t> order_;
  bool order_ready_ = false;
  size_t windows_per_chunk_ = 0;
  size_t n_batches_ = 0;
  uint64_t steps_per_epoch_ = 0;

  const DatasetManifest* manifest_ = nullptr;
  const Corpus* corpus_ = nullptr;
  std::filesystem::path out_dir_;
  std::filesystem::path last_checkpoint_;
};

void write_train_report(const TrainReport& report, const std::filesystem::path& path);

}  // namespace srnn
