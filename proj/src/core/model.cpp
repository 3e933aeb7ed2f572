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

#include "core/model.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/quantizer.hpp"
#include "core/rng.hpp"

namespace srnn {
namespace {

struct ParamSpec {
  std::string name;
  Shape shape;
  size_t fan_in = 0;  // 0: not randomly initialized
};

std::vector<ParamSpec> parameter_specs(const ModelConfig& cfg) {
  const size_t q = cfg.q_levels, e = cfg.embed_dim, h = cfg.hidden_dim, fs = cfg.frame_size;
  std::vector<ParamSpec> specs;
  specs.push_back({"frame.input.weight", {h, fs}, fs});
  specs.push_back({"frame.input.bias", {h}, 0});
  for (int l = 0; l < cfg.n_rnn_layers; ++l) {
    const std::string prefix = "frame.lstm" + std::to_string(l);
    specs.push_back({prefix + ".w_in.v", {4 * h, h}, h});
    specs.push_back({prefix + ".w_in.g", {4 * h}, 0});
    specs.push_back({prefix + ".w_rec.v", {4 * h, h}, h});
    specs.push_back({prefix + ".w_rec.g", {4 * h}, 0});
    specs.push_back({prefix + ".bias", {4 * h}, 0});
  }
  specs.push_back({"frame.upsample.weight", {fs * h, h}, h});
  specs.push_back({"frame.upsample.bias", {fs * h}, 0});
  // The lookup table is a linear map from a one-hot level vector.
  specs.push_back({"sample.embedding", {q, e}, q});
  specs.push_back({"sample.fc0.v", {h, fs * e}, fs * e});
  specs.push_back({"sample.fc0.g", {h}, 0});
  specs.push_back({"sample.fc0.bias", {h}, 0});
  specs.push_back({"sample.fc1.v", {h, h}, h});
  specs.push_back({"sample.fc1.g", {h}, 0});
  specs.push_back({"sample.fc1.bias", {h}, 0});
  specs.push_back({"sample.out.v", {q, h}, h});
  specs.push_back({"sample.out.g", {q}, 0});
  specs.push_back({"sample.out.bias", {q}, 0});
  return specs;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

Var bind_wn(Tape& tape, ModelState& model, const std::string& base) {
  Parameter& v = model.param(base + ".v");
  Parameter& g = model.param(base + ".g");
  return tape.weight_norm(tape.parameter(v.value, &v.grad), tape.parameter(g.value, &g.grad));
}

Var bind_plain(Tape& tape, ModelState& model, const std::string& name) {
  Parameter& p = model.param(name);
  return tape.parameter(p.value, &p.grad);
}

}  // namespace

ModelConfig ModelConfig::desk_preset() {
  ModelConfig cfg;
  cfg.q_levels = 256;
  cfg.embed_dim = 16;
  cfg.hidden_dim = 64;
  cfg.n_rnn_layers = 1;
  cfg.frame_size = 4;
  cfg.tbptt_len = 128;
  cfg.batch_size = 8;
  return cfg;
}

void ModelConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string("model config: ") + what);
  };
  require(q_levels >= 2, "q_levels must be >= 2");
  require(embed_dim > 0, "embed_dim must be positive");
  require(hidden_dim > 0, "hidden_dim must be positive");
  require(n_rnn_layers > 0, "n_rnn_layers must be positive");
  require(frame_size > 0, "frame_size must be positive");
  require(sample_rate > 0, "sample_rate must be positive");
  require(tbptt_len > 0, "tbptt_len must be positive");
  require(tbptt_len % frame_size == 0, "tbptt_len must be divisible by frame_size");
  require(batch_size > 0, "batch_size must be positive");
}

RecurrentState RecurrentState::zeros(const ModelConfig& config, size_t batch) {
  RecurrentState s;
  for (int l = 0; l < config.n_rnn_layers; ++l) {
    s.h.emplace_back(Shape{batch, static_cast<size_t>(config.hidden_dim)});
    s.c.emplace_back(Shape{batch, static_cast<size_t>(config.hidden_dim)});
  }
  return s;
}

RecurrentState RecurrentState::rows(size_t begin, size_t end) const {
  RecurrentState out;
  const auto cut = [begin, end](const Tensor& t) {
    const size_t c = t.cols();
    return Tensor({end - begin, c}, std::vector<double>(t.data() + begin * c, t.data() + end * c));
  };
  for (const auto& t : h) out.h.push_back(cut(t));
  for (const auto& t : c) out.c.push_back(cut(t));
  return out;
}

std::vector<std::pair<std::string, Shape>> parameter_shapes(const ModelConfig& config) {
  std::vector<std::pair<std::string, Shape>> out;
  for (auto& s : parameter_specs(config)) out.emplace_back(std::move(s.name), std::move(s.shape));
  return out;
}

size_t parameter_count(const ModelConfig& cfg) {
  const size_t q = cfg.q_levels, e = cfg.embed_dim, h = cfg.hidden_dim, fs = cfg.frame_size;
  const size_t layers = cfg.n_rnn_layers;
  const size_t frame_input = h * fs + h;
  // two weight-normalized 4H x H matrices (direction + gain) and a 4H bias
  const size_t per_layer = 2 * (4 * h * h + 4 * h) + 4 * h;
  const size_t upsample = fs * h * h + fs * h;
  const size_t embedding = q * e;
  const size_t fc0 = h * fs * e + 2 * h;
  const size_t fc1 = h * h + 2 * h;
  const size_t out = q * h + 2 * q;
  return frame_input + layers * per_layer + upsample + embedding + fc0 + fc1 + out;
}

Parameter& ModelState::param(std::string_view name) {
  for (auto& p : params) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::kInvalidArgument, "no parameter named " + std::string(name));
}

const Parameter& ModelState::param(std::string_view name) const {
  return const_cast<ModelState*>(this)->param(name);
}

std::vector<Parameter*> ModelState::parameter_ptrs() {
  std::vector<Parameter*> out;
  for (auto& p : params) out.push_back(&p);
  return out;
}

size_t ModelState::scalar_count() const {
  size_t n = 0;
  for (const auto& p : params) n += p.value.size();
  return n;
}

void ModelState::zero_grad() {
  for (auto& p : params) p.zero_grad();
}

ModelState init_model(const ModelConfig& config, uint64_t seed) {
  config.validate();
  ModelState model;
  model.config = config;
  Rng rng(seed);
  for (auto& spec : parameter_specs(config)) {
    Tensor value(spec.shape);
    if (spec.fan_in > 0) {
      const double s = 1.0 / std::sqrt(static_cast<double>(spec.fan_in));
      for (double& x : value.values()) x = rng.uniform(-s, s);
    }
    model.params.emplace_back(spec.name, std::move(value));
  }
  // Gains start at the row norms so the effective matrix equals the draw.
  for (auto& p : model.params) {
    if (!ends_with(p.name, ".g")) continue;
    const std::string base = p.name.substr(0, p.name.size() - 2);
    const Tensor& v = model.param(base + ".v").value;
    for (size_t r = 0; r < v.rows(); ++r) {
      double sq = 0.0;
      for (double x : v.row(r)) sq += x * x;
      p.value[r] = std::sqrt(sq);
    }
  }
  const size_t h = config.hidden_dim;
  for (int l = 0; l < config.n_rnn_layers; ++l) {
    Tensor& bias = model.param("frame.lstm" + std::to_string(l) + ".bias").value;
    for (size_t i = h; i < 2 * h; ++i) bias[i] = 1.0;
  }
  return model;
}

BoundModel bind_for_training(Tape& tape, ModelState& model) {
  BoundModel b;
  b.in_w = bind_plain(tape, model, "frame.input.weight");
  b.in_b = bind_plain(tape, model, "frame.input.bias");
  for (int l = 0; l < model.config.n_rnn_layers; ++l) {
    const std::string prefix = "frame.lstm" + std::to_string(l);
    b.lstm.push_back({bind_wn(tape, model, prefix + ".w_in"),
                      bind_wn(tape, model, prefix + ".w_rec"),
                      bind_plain(tape, model, prefix + ".bias")});
  }
  b.up_w = bind_plain(tape, model, "frame.upsample.weight");
  b.up_b = bind_plain(tape, model, "frame.upsample.bias");
  b.embedding = bind_plain(tape, model, "sample.embedding");
  b.fc0_w = bind_wn(tape, model, "sample.fc0");
  b.fc0_b = bind_plain(tape, model, "sample.fc0.bias");
  b.fc1_w = bind_wn(tape, model, "sample.fc1");
  b.fc1_b = bind_plain(tape, model, "sample.fc1.bias");
  b.out_w = bind_wn(tape, model, "sample.out");
  b.out_b = bind_plain(tape, model, "sample.out.bias");
  return b;
}

InferenceWeights::InferenceWeights(const ModelState& model) : config_(model.config) {
  // Same weight_norm op as training, evaluated once without gradients.
  Tape tape;
  const auto plain = [&](const std::string& name) {
    tensors_.push_back(model.param(name).value);
  };
  const auto wn = [&](const std::string& base) {
    const Var w = tape.weight_norm(tape.constant_ref(model.param(base + ".v").value),
                                   tape.constant_ref(model.param(base + ".g").value));
    tensors_.push_back(tape.value(w));
  };
  plain("frame.input.weight");
  plain("frame.input.bias");
  for (int l = 0; l < config_.n_rnn_layers; ++l) {
    const std::string prefix = "frame.lstm" + std::to_string(l);
    wn(prefix + ".w_in");
    wn(prefix + ".w_rec");
    plain(prefix + ".bias");
  }
  plain("frame.upsample.weight");
  plain("frame.upsample.bias");
  plain("sample.embedding");
  wn("sample.fc0");
  plain("sample.fc0.bias");
  wn("sample.fc1");
  plain("sample.fc1.bias");
  wn("sample.out");
  plain("sample.out.bias");
}

BoundModel InferenceWeights::bind(Tape& tape) const& {
  size_t k = 0;
  const auto next = [&] { return tape.constant_ref(tensors_[k++]); };
  BoundModel b;
  b.in_w = next();
  b.in_b = next();
  for (int l = 0; l < config_.n_rnn_layers; ++l) {
    BoundLstm layer;
    layer.w_in = next();
    layer.w_rec = next();
    layer.bias = next();
    b.lstm.push_back(layer);
  }
  b.up_w = next();
  b.up_b = next();
  b.embedding = next();
  b.fc0_w = next();
  b.fc0_b = next();
  b.fc1_w = next();
  b.fc1_b = next();
  b.out_w = next();
  b.out_b = next();
  return b;
}

LstmOutput lstm_cell(Tape& tape, const BoundLstm& layer, Var x, Var h, Var c) {
  const size_t hidden = tape.value(h).cols();
  const Var gates = tape.add_bias(
      tape.add(tape.linear(x, layer.w_in), tape.linear(h, layer.w_rec)), layer.bias);
  const Var i = tape.sigmoid(tape.slice_cols(gates, 0, hidden));
  const Var f = tape.sigmoid(tape.slice_cols(gates, hidden, 2 * hidden));
  const Var o = tape.sigmoid(tape.slice_cols(gates, 2 * hidden, 3 * hidden));
  const Var g = tape.tanh(tape.slice_cols(gates, 3 * hidden, 4 * hidden));
  const Var c_next = tape.add(tape.mul(f, c), tape.mul(i, g));
  const Var h_next = tape.mul(o, tape.tanh(c_next));
  return {h_next, c_next};
}

Var frame_tier(Tape& tape, const BoundModel& model, const ModelConfig& config, Var frames,
               size_t batch, TierState& state) {
  const size_t fs = config.frame_size, hidden = config.hidden_dim;
  const Tensor& fv = tape.value(frames);
  if (fv.rank() != 2 || fv.cols() != fs || fv.rows() % batch != 0) {
    throw Error(ErrorCode::kInvalidArgument, "frame tier: frames must be [steps*batch x FS]");
  }
  if (state.h.size() != static_cast<size_t>(config.n_rnn_layers) ||
      state.c.size() != state.h.size()) {
    throw Error(ErrorCode::kInvalidArgument, "frame tier: state has wrong layer count");
  }
  const size_t steps = fv.rows() / batch;
  const Var projected = tape.add_bias(tape.linear(frames, model.in_w), model.in_b);

  std::vector<Var> outputs;
  outputs.reserve(steps);
  for (size_t j = 0; j < steps; ++j) {
    Var input = steps == 1 ? projected : tape.slice_rows(projected, j * batch, (j + 1) * batch);
    Var skip_sum;
    for (size_t l = 0; l < model.lstm.size(); ++l) {
      const LstmOutput out = lstm_cell(tape, model.lstm[l], input, state.h[l], state.c[l]);
      state.h[l] = out.h;
      state.c[l] = out.c;
      skip_sum = skip_sum.valid() ? tape.add(skip_sum, out.h) : out.h;
      input = out.h;
    }
    outputs.push_back(skip_sum);
  }
  const Var stacked = outputs.size() == 1 ? outputs.front() : tape.concat_rows(outputs);
  const Var upsampled = tape.add_bias(tape.linear(stacked, model.up_w), model.up_b);
  return tape.reshape(upsampled, {steps * batch * fs, hidden});
}

Var sample_tier(Tape& tape, const BoundModel& model, const ModelConfig& config,
                std::span<const int> prev_levels, Var conditioning) {
  const size_t fs = config.frame_size;
  if (prev_levels.size() % fs != 0 || prev_levels.size() / fs != tape.value(conditioning).rows()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample tier: need FS previous levels per conditioning row");
  }
  for (int level : prev_levels) {
    if (level < 0 || level >= config.q_levels) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sample tier: level " + std::to_string(level) + " out of range");
    }
  }
  const Var embedded = tape.embed(model.embedding, prev_levels, fs);
  Var x = tape.add_bias(tape.linear(embedded, model.fc0_w), model.fc0_b);
  x = tape.relu(tape.add(x, conditioning));
  x = tape.relu(tape.add_bias(tape.linear(x, model.fc1_w), model.fc1_b));
  return tape.add_bias(tape.linear(x, model.out_w), model.out_b);
}

SequenceGraph build_sequence(Tape& tape, const BoundModel& model, const ModelConfig& config,
                             std::span<const int> levels, size_t batch, size_t seq_len,
                             const RecurrentState& state_in) {
  const size_t fs = config.frame_size;
  if (batch == 0 || levels.size() != batch * seq_len) {
    throw Error(ErrorCode::kInvalidArgument, "sequence: level count does not match batch");
  }
  if (seq_len <= fs || (seq_len - fs) % fs != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "sequence length must be FS context plus a positive multiple of FS");
  }
  if (state_in.batch() != batch || state_in.h.size() != static_cast<size_t>(config.n_rnn_layers)) {
    throw Error(ErrorCode::kInvalidArgument, "sequence: recurrent state does not match batch");
  }
  const size_t steps = (seq_len - fs) / fs;

  Tensor frames({steps * batch, fs});
  for (size_t j = 0; j < steps; ++j) {
    for (size_t b = 0; b < batch; ++b) {
      for (size_t s = 0; s < fs; ++s) {
        frames.at(j * batch + b, s) =
            dequantize_linear(levels[b * seq_len + j * fs + s], config.q_levels);
      }
    }
  }

  TierState state;
  for (size_t l = 0; l < state_in.h.size(); ++l) {
    state.h.push_back(tape.constant(state_in.h[l]));
    state.c.push_back(tape.constant(state_in.c[l]));
  }
  const Var conditioning = frame_tier(tape, model, config, tape.constant(std::move(frames)),
                                      batch, state);

  const size_t rows = steps * batch * fs;
  std::vector<int> prev(rows * fs);
  std::vector<int> targets(rows);
  for (size_t j = 0; j < steps; ++j) {
    for (size_t b = 0; b < batch; ++b) {
      for (size_t s = 0; s < fs; ++s) {
        const size_t row = logit_row(j, b, s, batch, fs);
        const size_t pos = (j + 1) * fs + s;
        const int* seq = levels.data() + b * seq_len;
        targets[row] = seq[pos];
        std::copy_n(seq + pos - fs, fs, prev.begin() + row * fs);
      }
    }
  }
  SequenceGraph graph;
  graph.logits = sample_tier(tape, model, config, prev, conditioning);
  graph.targets = std::move(targets);
  graph.state = std::move(state);
  return graph;
}

RecurrentState read_state(const Tape& tape, const TierState& state) {
  RecurrentState out;
  for (Var v : state.h) out.h.push_back(tape.value(v));
  for (Var v : state.c) out.c.push_back(tape.value(v));
  return out;
}

WindowOutput forward_sequence(const ModelState& model, std::span<const int> levels,
                              size_t batch, size_t seq_len, const RecurrentState& state_in) {
  const InferenceWeights weights(model);
  Tape tape;
  const BoundModel bound = weights.bind(tape);
  SequenceGraph graph = build_sequence(tape, bound, model.config, levels, batch, seq_len, state_in);
  const Var loss = tape.softmax_cross_entropy(graph.logits, graph.targets);
  WindowOutput out;
  out.logits = tape.value(graph.logits);
  out.targets = std::move(graph.targets);
  out.state = read_state(tape, graph.state);
  out.loss_nats = tape.value(loss)[0];
  out.relu_pattern = tape.relu_pattern();
  return out;
}

WindowOutput forward_window(const ModelState& model, std::span<const int> window, size_t batch,
                            const RecurrentState& state_in) {
  const size_t seq_len = static_cast<size_t>(model.config.tbptt_len + model.config.frame_size);
  if (batch == 0 || window.size() != batch * seq_len) {
    throw Error(ErrorCode::kInvalidArgument,
                "window must hold tbptt_len + frame_size = " + std::to_string(seq_len) +
                    " levels per sequence");
  }
  return forward_sequence(model, window, batch, seq_len, state_in);
}

double accumulate_window_gradients(ModelState& model, std::span<const int> window, size_t batch,
                                   RecurrentState& state) {
  const size_t seq_len = static_cast<size_t>(model.config.tbptt_len + model.config.frame_size);
  if (batch == 0 || window.size() != batch * seq_len) {
    throw Error(ErrorCode::kInvalidArgument, "window has the wrong number of levels");
  }
  Tape tape;
  const BoundModel bound = bind_for_training(tape, model);
  SequenceGraph graph = build_sequence(tape, bound, model.config, window, batch, seq_len, state);
  const Var loss = tape.softmax_cross_entropy(graph.logits, graph.targets);
  tape.backward(loss);
  state = read_state(tape, graph.state);
  return tape.value(loss)[0];
}

InferenceSession::InferenceSession(const ModelState& model) : weights_(model) {}

Tensor InferenceSession::frame_step(const Tensor& frame, RecurrentState& state) const {
  const ModelConfig& cfg = config();
  Tape tape;
  const BoundModel bound = weights_.bind(tape);
  TierState tier;
  for (size_t l = 0; l < state.h.size(); ++l) {
    tier.h.push_back(tape.constant_ref(state.h[l]));
    tier.c.push_back(tape.constant_ref(state.c[l]));
  }
  const Var cond = frame_tier(tape, bound, cfg, tape.constant_ref(frame), frame.rows(), tier);
  state = read_state(tape, tier);
  return tape.value(cond);
}

Tensor InferenceSession::sample_logits(std::span<const int> prev_levels,
                                       const Tensor& conditioning) const {
  Tape tape;
  const BoundModel bound = weights_.bind(tape);
  const Var logits =
      sample_tier(tape, bound, config(), prev_levels, tape.constant_ref(conditioning));
  return tape.value(logits);
}

}  // namespace srnn
