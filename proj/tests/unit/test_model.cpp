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

#include <cmath>
#include <numbers>

#include "core/error.hpp"
#include "core/model.hpp"
#include "core/optim.hpp"
#include "core/quantizer.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace srnn;
using testing::random_tensor;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.q_levels = 16;
  cfg.embed_dim = 3;
  cfg.hidden_dim = 5;
  cfg.n_rnn_layers = 2;
  cfg.frame_size = 2;
  cfg.tbptt_len = 6;
  cfg.batch_size = 2;
  return cfg;
}

std::vector<int> random_levels(Rng& rng, size_t n, int q) {
  std::vector<int> out(n);
  for (int& v : out) v = static_cast<int>(rng.below(q));
  return out;
}

RecurrentState random_state(Rng& rng, const ModelConfig& cfg, size_t batch, double sigma) {
  RecurrentState s = RecurrentState::zeros(cfg, batch);
  for (auto* list : {&s.h, &s.c}) {
    for (auto& t : *list) {
      for (double& v : t.values()) v = sigma * rng.gaussian();
    }
  }
  return s;
}

// Makes every effective weight and bias zero.
void zero_weights(ModelState& model) {
  for (auto& p : model.params) {
    const std::string& n = p.name;
    const bool direction = n.size() > 2 && n.compare(n.size() - 2, 2, ".v") == 0;
    if (!direction && n != "sample.embedding") p.value.fill(0.0);
  }
}

}  // namespace

TEST_CASE("model config validation") {
  CHECK_NOTHROW(ModelConfig{}.validate());
  CHECK_NOTHROW(ModelConfig::desk_preset().validate());
  ModelConfig bad = ModelConfig::desk_preset();
  bad.tbptt_len = 130;  // not a multiple of FS = 4
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ModelConfig::desk_preset();
  bad.q_levels = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ModelConfig::desk_preset();
  bad.n_rnn_layers = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("desk preset parameter count") {
  const ModelConfig cfg = ModelConfig::desk_preset();
  CHECK(parameter_count(cfg) == 79936);
  CHECK(init_model(cfg, 1).scalar_count() == 79936);
}

TEST_CASE("parameter count formula matches allocation (property)") {
  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    ModelConfig cfg;
    cfg.q_levels = 2 + static_cast<int>(rng.below(40));
    cfg.embed_dim = 1 + static_cast<int>(rng.below(6));
    cfg.hidden_dim = 1 + static_cast<int>(rng.below(9));
    cfg.n_rnn_layers = 1 + static_cast<int>(rng.below(3));
    cfg.frame_size = 1 + static_cast<int>(rng.below(4));
    cfg.tbptt_len = cfg.frame_size * (1 + static_cast<int>(rng.below(4)));
    cfg.batch_size = 1;
    size_t from_shapes = 0;
    for (const auto& [name, shape] : parameter_shapes(cfg)) from_shapes += shape_size(shape);
    const ModelState m = init_model(cfg, trial);
    CHECK(parameter_count(cfg) == from_shapes);
    CHECK(m.scalar_count() == from_shapes);
    REQUIRE(m.params.size() == parameter_shapes(cfg).size());
  }
}

TEST_CASE("init is deterministic and seeds differ") {
  const ModelConfig cfg = ModelConfig::desk_preset();
  const ModelState a = init_model(cfg, 7), b = init_model(cfg, 7), c = init_model(cfg, 8);
  bool all_equal = true, any_diff = false;
  for (size_t i = 0; i < a.params.size(); ++i) {
    all_equal = all_equal && a.params[i].value == b.params[i].value;
    any_diff = any_diff || !(a.params[i].value == c.params[i].value);
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("init: forget bias ones, other biases zero, weights within fan-in bound") {
  const ModelConfig cfg = ModelConfig::desk_preset();
  const ModelState m = init_model(cfg, 3);
  const size_t h = cfg.hidden_dim;
  const Tensor& bias = m.param("frame.lstm0.bias").value;
  for (size_t i = 0; i < 4 * h; ++i) CHECK(bias[i] == ((i >= h && i < 2 * h) ? 1.0 : 0.0));
  for (double v : m.param("sample.out.bias").value.values()) CHECK(v == 0.0);
  const double bound = 1.0 / std::sqrt(double(cfg.frame_size));
  for (double v : m.param("frame.input.weight").value.values()) CHECK(std::abs(v) <= bound);
  // Gains start at the row norms, so effective weights equal the raw directions.
  const Tensor& v = m.param("sample.fc1.v").value;
  const Tensor& g = m.param("sample.fc1.g").value;
  for (size_t r = 0; r < v.rows(); ++r) {
    double n = 0.0;
    for (double x : v.row(r)) n += x * x;
    CHECK(g[r] == doctest::Approx(std::sqrt(n)).epsilon(1e-14));
  }
}

TEST_CASE("lstm cell with zero everything stays at zero") {
  const size_t h = 4;
  Tape t;
  BoundLstm layer;
  layer.w_in = t.constant(Tensor({4 * h, 3}, 0.0));
  layer.w_rec = t.constant(Tensor({4 * h, h}, 0.0));
  Tensor bias({4 * h}, 0.0);
  for (size_t i = h; i < 2 * h; ++i) bias[i] = 1.0;
  layer.bias = t.constant(bias);
  const auto out = lstm_cell(t, layer, t.constant(Tensor({2, 3}, 0.0)),
                             t.constant(Tensor({2, h}, 0.0)), t.constant(Tensor({2, h}, 0.0)));
  for (double v : t.value(out.h).values()) CHECK(v == 0.0);
  for (double v : t.value(out.c).values()) CHECK(v == 0.0);
}

TEST_CASE("lstm cell gate order and bounded output") {
  Rng rng(62);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t h = 1 + rng.below(4), in = 1 + rng.below(4), b = 1 + rng.below(3);
    const Tensor w_in = random_tensor(rng, {4 * h, in}, -3, 3);
    const Tensor w_rec = random_tensor(rng, {4 * h, h}, -3, 3);
    const Tensor bias = random_tensor(rng, {4 * h});
    const Tensor x = random_tensor(rng, {b, in}), h0 = random_tensor(rng, {b, h});
    const Tensor c0 = random_tensor(rng, {b, h}, -2, 2);
    Tape t;
    const BoundLstm layer{t.constant(w_in), t.constant(w_rec), t.constant(bias)};
    const auto out = lstm_cell(t, layer, t.constant(x), t.constant(h0), t.constant(c0));
    const auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
    for (size_t r = 0; r < b; ++r) {
      for (size_t u = 0; u < h; ++u) {
        double pre[4];
        for (size_t gate = 0; gate < 4; ++gate) {
          const size_t row = gate * h + u;
          double z = bias[row];
          for (size_t k = 0; k < in; ++k) z += w_in.at(row, k) * x.at(r, k);
          for (size_t k = 0; k < h; ++k) z += w_rec.at(row, k) * h0.at(r, k);
          pre[gate] = z;
        }
        const double c = sig(pre[1]) * c0.at(r, u) + sig(pre[0]) * std::tanh(pre[3]);
        const double hv = sig(pre[2]) * std::tanh(c);
        CHECK(t.value(out.c).at(r, u) == doctest::Approx(c).epsilon(1e-12));
        CHECK(t.value(out.h).at(r, u) == doctest::Approx(hv).epsilon(1e-12));
        CHECK(std::abs(t.value(out.h).at(r, u)) <= 1.0);
      }
    }
  }
}

TEST_CASE("lstm cell full gradient matches finite differences") {
  Rng rng(63);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t h = 1 + rng.below(4), in = 1 + rng.below(4), b = 1 + rng.below(3);
    const double err = testing::max_fd_error(
        {random_tensor(rng, {4 * h, in}), random_tensor(rng, {4 * h, h}),
         random_tensor(rng, {4 * h}), random_tensor(rng, {b, in}), random_tensor(rng, {b, h}),
         random_tensor(rng, {b, h})},
        [](Tape& t, const std::vector<Var>& v) {
          const auto out = lstm_cell(t, BoundLstm{v[0], v[1], v[2]}, v[3], v[4], v[5]);
          const Var parts[] = {out.h, out.c};
          return t.concat_rows(parts);
        },
        rng);
    REQUIRE(err < 1e-6);
  }
}

TEST_CASE("frame tier: two frames at once equal one at a time") {
  Rng rng(64);
  const ModelConfig cfg = tiny_config();
  const ModelState model = init_model(cfg, 5);
  const InferenceWeights weights(model);
  const size_t batch = 2, fs = cfg.frame_size;
  const Tensor frames = random_tensor(rng, {2 * batch, fs});
  const RecurrentState s0 = random_state(rng, cfg, batch, 0.3);

  Tape t;
  const BoundModel bound = weights.bind(t);
  TierState joint;
  for (size_t l = 0; l < s0.h.size(); ++l) {
    joint.h.push_back(t.constant(s0.h[l]));
    joint.c.push_back(t.constant(s0.c[l]));
  }
  TierState step = joint;
  const Tensor both = t.value(frame_tier(t, bound, cfg, t.constant(frames), batch, joint));
  const Tensor first =
      t.value(frame_tier(t, bound, cfg, t.slice_rows(t.constant(frames), 0, batch), batch, step));
  const Tensor second = t.value(
      frame_tier(t, bound, cfg, t.slice_rows(t.constant(frames), batch, 2 * batch), batch, step));
  const size_t half = batch * fs * cfg.hidden_dim;
  for (size_t i = 0; i < half; ++i) {
    CHECK(both[i] == doctest::Approx(first[i]).epsilon(1e-14));
    CHECK(both[half + i] == doctest::Approx(second[i]).epsilon(1e-14));
  }
  CHECK(read_state(t, joint) == read_state(t, step));
}

TEST_CASE("frame tier: zero upsampling gives zero conditioning") {
  ModelState model = init_model(tiny_config(), 6);
  model.param("frame.upsample.weight").value.fill(0.0);
  model.param("frame.upsample.bias").value.fill(0.0);
  Rng rng(65);
  const InferenceWeights weights(model);
  Tape t;
  const BoundModel bound = weights.bind(t);
  const RecurrentState s0 = random_state(rng, model.config, 2, 0.5);
  TierState st;
  for (size_t l = 0; l < s0.h.size(); ++l) {
    st.h.push_back(t.constant(s0.h[l]));
    st.c.push_back(t.constant(s0.c[l]));
  }
  const Tensor cond = t.value(
      frame_tier(t, bound, model.config, t.constant(random_tensor(rng, {6, 2})), 2, st));
  CHECK(cond.rows() == 6 * 2);
  for (double v : cond.values()) CHECK(v == 0.0);
}

TEST_CASE("single-layer skip sum is the layer output") {
  // With one layer, the upsampled conditioning only depends on that layer's h.
  ModelConfig cfg = tiny_config();
  cfg.n_rnn_layers = 1;
  const ModelState model = init_model(cfg, 9);
  Rng rng(66);
  const Tensor frame = random_tensor(rng, {1, size_t(cfg.frame_size)});
  RecurrentState state = RecurrentState::zeros(cfg, 1);
  const Tensor cond = InferenceSession(model).frame_step(frame, state);
  const Tensor& up_w = model.param("frame.upsample.weight").value;
  const Tensor& up_b = model.param("frame.upsample.bias").value;
  const Tensor expect = matmul_transposed(state.h[0], up_w);
  for (size_t i = 0; i < expect.size(); ++i) {
    CHECK(cond[i] == doctest::Approx(expect[i] + up_b[i]).epsilon(1e-13));
  }
}

TEST_CASE("zero weights give uniform predictions") {
  ModelState model = init_model(tiny_config(), 11);
  zero_weights(model);
  Rng rng(67);
  const ModelConfig& cfg = model.config;
  const size_t seq = cfg.tbptt_len + cfg.frame_size;
  const auto out = forward_window(model, random_levels(rng, 2 * seq, cfg.q_levels), 2,
                                  RecurrentState::zeros(cfg, 2));
  for (double v : out.logits.values()) CHECK(v == 0.0);
  CHECK(out.loss_nats / std::numbers::ln2 == doctest::Approx(std::log2(16.0)).epsilon(1e-14));
}

TEST_CASE("forward window shapes") {
  ModelConfig cfg = tiny_config();
  cfg.tbptt_len = cfg.frame_size;
  const ModelState model = init_model(cfg, 12);
  Rng rng(68);
  const RecurrentState s0 = RecurrentState::zeros(cfg, 1);
  const auto out = forward_window(model, random_levels(rng, 2 * cfg.frame_size, cfg.q_levels), 1,
                                  s0);
  CHECK(out.logits.rows() == static_cast<size_t>(cfg.frame_size));
  CHECK(out.logits.cols() == static_cast<size_t>(cfg.q_levels));
  CHECK(out.targets.size() == static_cast<size_t>(cfg.frame_size));
  CHECK_FALSE(out.state == s0);
  CHECK_THROWS_AS(forward_window(model, random_levels(rng, 5, cfg.q_levels), 1, s0), Error);
}

TEST_CASE("targets follow the (step, batch, slot) row order") {
  const ModelConfig cfg = tiny_config();
  const ModelState model = init_model(cfg, 13);
  const size_t seq = cfg.tbptt_len + cfg.frame_size, batch = 2, fs = cfg.frame_size;
  std::vector<int> levels(batch * seq);
  for (size_t i = 0; i < levels.size(); ++i) levels[i] = static_cast<int>(i % cfg.q_levels);
  const auto out = forward_window(model, levels, batch, RecurrentState::zeros(cfg, batch));
  for (size_t j = 0; j < size_t(cfg.tbptt_len) / fs; ++j) {
    for (size_t b = 0; b < batch; ++b) {
      for (size_t s = 0; s < fs; ++s) {
        CHECK(out.targets[logit_row(j, b, s, batch, fs)] == levels[b * seq + (j + 1) * fs + s]);
      }
    }
  }
}

TEST_CASE("chunked evaluation equals one long pass") {
  const ModelConfig cfg = tiny_config();
  const ModelState model = init_model(cfg, 14);
  Rng rng(69);
  const size_t fs = cfg.frame_size, t = cfg.tbptt_len, windows = 3, batch = 2;
  const size_t total = windows * t + fs;
  const auto levels = random_levels(rng, batch * total, cfg.q_levels);
  const RecurrentState s0 = random_state(rng, cfg, batch, 0.2);
  const auto whole = forward_sequence(model, levels, batch, total, s0);

  RecurrentState state = s0;
  for (size_t w = 0; w < windows; ++w) {
    std::vector<int> window;
    for (size_t b = 0; b < batch; ++b) {
      const auto* seq = levels.data() + b * total;
      window.insert(window.end(), seq + w * t, seq + w * t + t + fs);
    }
    const auto part = forward_window(model, window, batch, state);
    state = part.state;
    const size_t steps = t / fs;
    for (size_t j = 0; j < steps; ++j) {
      for (size_t b = 0; b < batch; ++b) {
        for (size_t s = 0; s < fs; ++s) {
          const size_t r_part = logit_row(j, b, s, batch, fs);
          const size_t r_whole = logit_row(w * steps + j, b, s, batch, fs);
          for (size_t q = 0; q < size_t(cfg.q_levels); ++q) {
            REQUIRE(std::abs(part.logits.at(r_part, q) - whole.logits.at(r_whole, q)) < 1e-9);
          }
        }
      }
    }
  }
  for (size_t l = 0; l < state.h.size(); ++l) {
    for (size_t i = 0; i < state.h[l].size(); ++i) {
      CHECK(std::abs(state.h[l][i] - whole.state.h[l][i]) < 1e-12);
    }
  }
}

TEST_CASE("predicted distributions sum to one") {
  const ModelConfig cfg = tiny_config();
  const ModelState model = init_model(cfg, 15);
  Rng rng(70);
  const size_t seq = cfg.tbptt_len + cfg.frame_size;
  const auto out = forward_window(model, random_levels(rng, 2 * seq, cfg.q_levels), 2,
                                  RecurrentState::zeros(cfg, 2));
  const Tensor p = softmax_rows(out.logits);
  for (size_t r = 0; r < p.rows(); ++r) {
    double total = 0.0;
    for (double v : p.row(r)) total += v;
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("inference session reproduces teacher-forced logits") {
  const ModelConfig cfg = tiny_config();
  const ModelState model = init_model(cfg, 16);
  Rng rng(71);
  const size_t fs = cfg.frame_size, seq = cfg.tbptt_len + fs;
  const auto levels = random_levels(rng, seq, cfg.q_levels);
  const RecurrentState s0 = random_state(rng, cfg, 1, 0.3);
  const auto teacher = forward_window(model, levels, 1, s0);

  const InferenceSession session(model);
  RecurrentState state = s0;
  for (size_t j = 0; j < size_t(cfg.tbptt_len) / fs; ++j) {
    Tensor frame({1, fs});
    for (size_t s = 0; s < fs; ++s) frame[s] = dequantize_linear(levels[j * fs + s], cfg.q_levels);
    const Tensor cond = session.frame_step(frame, state);
    for (size_t s = 0; s < fs; ++s) {
      const size_t pos = (j + 1) * fs + s;
      Tensor slot({1, size_t(cfg.hidden_dim)});
      std::copy_n(cond.data() + s * cfg.hidden_dim, cfg.hidden_dim, slot.data());
      const Tensor logits =
          session.sample_logits(std::span<const int>(levels.data() + pos - fs, fs), slot);
      CHECK(logits.size() == size_t(cfg.q_levels));
      for (size_t q = 0; q < logits.size(); ++q) {
        REQUIRE(std::abs(logits[q] - teacher.logits.at(j * fs + s, q)) < 1e-12);
      }
    }
  }
}

TEST_CASE("end-to-end gradient matches finite differences on a small model") {
  ModelConfig cfg = tiny_config();
  ModelState model = init_model(cfg, 17);
  Rng rng(72);
  // Zero-initialized biases can put a relu input exactly on its kink, where
  // the one-sided convention and the finite difference legitimately disagree.
  for (auto& p : model.params) {
    for (double& v : p.value.values()) v += 0.05 * rng.uniform(-1.0, 1.0);
  }
  const size_t batch = 2, seq = cfg.tbptt_len + cfg.frame_size;
  const auto window = random_levels(rng, batch * seq, cfg.q_levels);
  const RecurrentState s0 = random_state(rng, cfg, batch, 0.2);
  model.zero_grad();
  RecurrentState s = s0;
  accumulate_window_gradients(model, window, batch, s);
  double worst = 0.0;
  std::string worst_name;
  for (auto& p : model.params) {
    for (size_t i = 0; i < p.value.size(); ++i) {
      const double x0 = p.value[i];
      const auto f = [&](double x) {
        p.value[i] = x;
        const double loss = forward_window(model, window, batch, s0).loss_nats;
        p.value[i] = x0;
        return loss;
      };
      const double numeric = testing::five_point(f, x0, 1e-4);
      const double err = testing::floored_relative_error(p.grad[i], numeric);
      if (err > worst) {
        worst = err;
        worst_name = p.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  INFO("worst coordinate " << worst_name);
  CHECK(worst < 1e-4);
}

TEST_CASE("state carry-out equals the input for the next window") {
  ModelState model = init_model(tiny_config(), 18);
  Rng rng(73);
  const size_t seq = model.config.tbptt_len + model.config.frame_size;
  const auto window = random_levels(rng, seq, model.config.q_levels);
  RecurrentState s = RecurrentState::zeros(model.config, 1);
  const auto fwd = forward_window(model, window, 1, s);
  accumulate_window_gradients(model, window, 1, s);
  CHECK(s == fwd.state);
}
