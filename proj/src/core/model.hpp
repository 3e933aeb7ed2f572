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
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/optim.hpp"
#include "core/tape.hpp"
#include "core/tensor.hpp"

namespace srnn {

// Hyperparameters of the two-tier model. Defaults are the full-size
// configuration; desk_preset() is the small CPU configuration.
struct ModelConfig {
  int q_levels = 256;
  int embed_dim = 256;
  int hidden_dim = 1024;
  int n_rnn_layers = 5;
  int frame_size = 16;
  uint32_t sample_rate = 16000;
  int tbptt_len = 512;
  int batch_size = 128;

  static ModelConfig desk_preset();
  // Throws kInvalidArgument naming the first offending field.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Per-layer LSTM hidden and cell vectors, each [batch x hidden_dim].
struct RecurrentState {
  std::vector<Tensor> h;
  std::vector<Tensor> c;

  static RecurrentState zeros(const ModelConfig& config, size_t batch);
  size_t batch() const { return h.empty() ? 0 : h.front().rows(); }
  // Rows [begin, end) of every tensor.
  RecurrentState rows(size_t begin, size_t end) const;

  friend bool operator==(const RecurrentState&, const RecurrentState&) = default;
};

// Ordered (name, shape) list of every learnable tensor for a config.
std::vector<std::pair<std::string, Shape>> parameter_shapes(const ModelConfig& config);

// Closed-form scalar parameter count.
size_t parameter_count(const ModelConfig& config);

class ModelState {
 public:
  ModelConfig config;
  std::vector<Parameter> params;

  Parameter& param(std::string_view name);
  const Parameter& param(std::string_view name) const;
  std::vector<Parameter*> parameter_ptrs();
  size_t scalar_count() const;
  void zero_grad();
};

// Uniform [-1/sqrt(fan_in), 1/sqrt(fan_in)] weights from splitmix64(seed),
// weight-norm gains set to the initial row norms, zero biases except the
// LSTM forget gate (1).
ModelState init_model(const ModelConfig& config, uint64_t seed);

// ---- graph construction ----

struct BoundLstm {
  Var w_in, w_rec, bias;  // effective [4H x in], [4H x H], [4H]; gates i, f, o, g
};

// Effective weights of the model as tape values.
struct BoundModel {
  Var in_w, in_b;
  std::vector<BoundLstm> lstm;
  Var up_w, up_b;
  Var embedding;
  Var fc0_w, fc0_b, fc1_w, fc1_b, out_w, out_b;
};

// Binds parameters as gradient-receiving leaves (gradients are added into
// Parameter::grad on backward) with weight normalization on the tape.
BoundModel bind_for_training(Tape& tape, ModelState& model);

// Precomputed effective weights for inference.
class InferenceWeights {
 public:
  explicit InferenceWeights(const ModelState& model);
  // The tape borrows the weights, so they must outlive it.
  BoundModel bind(Tape& tape) const&;
  BoundModel bind(Tape& tape) const&& = delete;
  const ModelConfig& config() const { return config_; }

 private:
  ModelConfig config_;
  std::vector<Tensor> tensors_;  // in BoundModel field order
};

struct LstmOutput {
  Var h, c;
};

LstmOutput lstm_cell(Tape& tape, const BoundLstm& layer, Var x, Var h, Var c);

struct TierState {
  std::vector<Var> h, c;
};

// Frame tier over n_frames steps. `frames` is [n_frames * batch x FS] with
// rows ordered (step, batch). Returns conditioning [n_frames * batch * FS x H]
// ordered (step, batch, slot); slot s of step j conditions sample s of the
// frame after frame j. `state` is read and replaced by the final state.
Var frame_tier(Tape& tape, const BoundModel& model, const ModelConfig& config, Var frames,
               size_t batch, TierState& state);

// Sample tier: `prev_levels` holds FS levels per row, `conditioning` is
// [rows x H]. Returns logits [rows x q_levels].
Var sample_tier(Tape& tape, const BoundModel& model, const ModelConfig& config,
                std::span<const int> prev_levels, Var conditioning);

struct SequenceGraph {
  Var logits;                // [n_frames * batch * FS x Q], rows (step, batch, slot)
  std::vector<int> targets;  // matching row order
  TierState state;
};

// Teacher-forced graph over `batch` sequences stored row-major in `levels`,
// each of length seq_len = n_frames * FS + FS. The leading FS levels are
// context; every later position is predicted.
SequenceGraph build_sequence(Tape& tape, const BoundModel& model, const ModelConfig& config,
                             std::span<const int> levels, size_t batch, size_t seq_len,
                             const RecurrentState& state_in);

RecurrentState read_state(const Tape& tape, const TierState& state);

// ---- value-level API ----

struct WindowOutput {
  Tensor logits;             // rows ordered (step, batch, slot)
  std::vector<int> targets;
  RecurrentState state;
  double loss_nats = 0.0;    // mean cross-entropy over all predicted samples
  uint64_t relu_pattern = 0; // see Tape::relu_pattern
};

// Forward pass over a tbptt window (tbptt_len + FS levels per sequence).
WindowOutput forward_window(const ModelState& model, std::span<const int> window, size_t batch,
                            const RecurrentState& state_in);

// Like forward_window but for any seq_len = k * FS + FS.
WindowOutput forward_sequence(const ModelState& model, std::span<const int> levels,
                              size_t batch, size_t seq_len, const RecurrentState& state_in);

// Forward + backward over one window. Adds gradients of the mean
// cross-entropy into the parameters, replaces `state` with the detached final
// state and returns the loss in nats.
double accumulate_window_gradients(ModelState& model, std::span<const int> window,
                                   size_t batch, RecurrentState& state);

// Row index of (step, batch, slot) in logits/targets.
inline size_t logit_row(size_t step, size_t b, size_t slot, size_t batch, size_t frame_size) {
  return (step * batch + b) * frame_size + slot;
}

// Step-wise inference for generation. Holds effective weights only.
class InferenceSession {
 public:
  explicit InferenceSession(const ModelState& model);

  const ModelConfig& config() const { return weights_.config(); }

  // One frame-tier step: `frame` holds FS dequantized samples per batch row
  // ([batch x FS]). Returns conditioning [batch * FS x H] ordered (batch, slot)
  // and advances `state`.
  Tensor frame_step(const Tensor& frame, RecurrentState& state) const;

  // Logits [rows x Q] for rows of FS previous levels and matching
  // conditioning rows.
  Tensor sample_logits(std::span<const int> prev_levels, const Tensor& conditioning) const;

 private:
  InferenceWeights weights_;
};

}  // namespace srnn
