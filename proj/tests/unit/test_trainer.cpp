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
#include <cstring>
#include <numbers>

#include "core/checkpoint.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/quantizer.hpp"
#include "core/trainer.hpp"
#include "core/util.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace srnn;

namespace {

ModelConfig small_config() {
  ModelConfig cfg;
  cfg.q_levels = 32;
  cfg.embed_dim = 4;
  cfg.hidden_dim = 8;
  cfg.n_rnn_layers = 2;
  cfg.frame_size = 4;
  cfg.tbptt_len = 16;
  cfg.batch_size = 3;
  cfg.sample_rate = 1000;
  return cfg;
}

struct Fixture {
  DatasetManifest manifest;
  Corpus corpus;
};

// Noisy sawtooth chunked into n_chunks chunks of chunk_len samples.
Fixture make_fixture(size_t total, size_t chunk_len, size_t n_chunks, SplitFractions fractions,
                     uint32_t sample_rate = 1000, uint64_t seed = 3) {
  auto x = testing::sawtooth(total, 25.0, sample_rate, 0.7);
  Rng rng(seed);
  for (double& v : x) v = std::clamp(v + 0.05 * rng.uniform(-1, 1), -1.0, 1.0);
  AudioClip clip(x, sample_rate);
  const double seconds = double(chunk_len) / sample_rate;
  const auto spans = chunk(clip, seconds, n_chunks);
  Fixture f;
  f.manifest = shuffle_split(spans, "clip.wav", seed, fractions, sample_rate, seconds);
  f.corpus.emplace("clip.wav", std::move(clip));
  return f;
}

TrainConfig quiet_config(uint64_t seed = 5) {
  TrainConfig tc;
  tc.preview_seconds = 0.0;
  tc.seed = seed;
  return tc;
}

bool same_params(const ModelState& a, const ModelState& b) {
  if (a.params.size() != b.params.size()) return false;
  for (size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name) return false;
    if (!(a.params[i].value == b.params[i].value)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("one chunk of exactly one window is one step per epoch") {
  const ModelConfig cfg = small_config();
  const size_t len = cfg.tbptt_len + cfg.frame_size;
  Fixture f = make_fixture(len, len, 1, {1.0, 0.0, 0.0});
  Trainer trainer(init_model(cfg, 1), f.manifest, f.corpus, quiet_config());
  CHECK(trainer.windows_per_chunk() == 1);
  CHECK(trainer.steps_per_epoch() == 1);
  const TrainReport report = trainer.run();
  CHECK(report.total_steps == 1);
  CHECK(report.finished);
  REQUIRE(report.epochs.size() == 1);
  CHECK(std::isfinite(report.epochs[0].train_bits));
}

TEST_CASE("window arithmetic: floor((L - FS) / T) windows per chunk") {
  const ModelConfig cfg = small_config();  // FS 4, T 16
  Fixture f = make_fixture(400, 55, 10, {1.0, 0.0, 0.0});  // (55 - 4) / 16 = 3
  Trainer trainer(init_model(cfg, 1), f.manifest, f.corpus, quiet_config());
  CHECK(trainer.windows_per_chunk() == 3);
  CHECK(trainer.steps_per_epoch() == 4 * 3);  // ceil(10 / 3) batches
}

TEST_CASE("fresh desk model starts near 8 bits per sample") {
  ModelConfig cfg = ModelConfig::desk_preset();
  cfg.sample_rate = 2000;
  Fixture f = make_fixture(4000, 500, 16, {1.0, 0.0, 0.0}, 2000);
  Trainer trainer(init_model(cfg, 2), f.manifest, f.corpus, quiet_config());
  const double bits = trainer.step_once();
  CHECK(std::abs(bits - 8.0) < 0.5);
}

TEST_CASE("short chunks are rejected") {
  const ModelConfig cfg = small_config();
  Fixture f = make_fixture(100, 19, 3, {1.0, 0.0, 0.0});  // 19 < T + FS = 20
  CHECK_THROWS_AS(Trainer(init_model(cfg, 1), f.manifest, f.corpus, quiet_config()), Error);
}

TEST_CASE("training is deterministic") {
  const ModelConfig cfg = small_config();
  Fixture f = make_fixture(600, 60, 12, {0.5, 0.25, 0.25});
  TrainConfig tc = quiet_config();
  tc.epochs = 2;
  Trainer a(init_model(cfg, 4), f.manifest, f.corpus, tc);
  Trainer b(init_model(cfg, 4), f.manifest, f.corpus, tc);
  const TrainReport ra = a.run(), rb = b.run();
  CHECK(ra == rb);
  REQUIRE(ra.epochs.size() == 2);
  CHECK(ra.epochs[0].valid_bits.has_value());
  CHECK(same_params(a.model(), b.model()));
  CHECK(a.optimizer() == b.optimizer());
}

TEST_CASE("one small Adam step lowers the loss of the same batch") {
  ModelConfig cfg = ModelConfig::desk_preset();
  cfg.sample_rate = 1000;
  ModelState model = init_model(cfg, 6);
  Rng rng(7);
  const size_t seq = cfg.tbptt_len + cfg.frame_size, batch = 2;
  const auto x = testing::sawtooth(batch * seq, 25.0, 1000, 0.7);
  std::vector<int> window(x.size());
  for (size_t i = 0; i < x.size(); ++i) window[i] = quantize_linear(x[i], cfg.q_levels);
  const RecurrentState zero = RecurrentState::zeros(cfg, batch);
  const double before = forward_window(model, window, batch, zero).loss_nats;
  RecurrentState s = zero;
  model.zero_grad();
  accumulate_window_gradients(model, window, batch, s);
  auto params = model.parameter_ptrs();
  AdamState adam = AdamState::zeros_like(params);
  AdamConfig ac;
  ac.lr = 1e-4;
  adam_step(params, adam, ac);
  const double after = forward_window(model, window, batch, zero).loss_nats;
  CHECK(after < before);
}

TEST_CASE("carried state changes gradients but keeps them finite") {
  const ModelConfig cfg = small_config();
  ModelState carried = init_model(cfg, 8);
  ModelState reset = init_model(cfg, 8);
  Rng rng(9);
  const size_t seq = cfg.tbptt_len + cfg.frame_size;
  std::vector<int> w1(seq), w2(seq);
  for (int& v : w1) v = static_cast<int>(rng.below(cfg.q_levels));
  for (int& v : w2) v = static_cast<int>(rng.below(cfg.q_levels));
  RecurrentState s = RecurrentState::zeros(cfg, 1);
  accumulate_window_gradients(carried, w1, 1, s);
  carried.zero_grad();
  const double l_carried = accumulate_window_gradients(carried, w2, 1, s);
  RecurrentState zero = RecurrentState::zeros(cfg, 1);
  const double l_reset = accumulate_window_gradients(reset, w2, 1, zero);
  CHECK(std::isfinite(l_carried));
  CHECK(std::isfinite(l_reset));
  CHECK(l_carried != l_reset);
  bool differs = false;
  for (size_t i = 0; i < carried.params.size(); ++i) {
    for (size_t k = 0; k < carried.params[i].grad.size(); ++k) {
      CHECK(std::isfinite(carried.params[i].grad[k]));
      differs = differs || carried.params[i].grad[k] != reset.params[i].grad[k];
    }
  }
  CHECK(differs);
}

TEST_CASE("non-finite loss aborts with a numeric error") {
  const ModelConfig cfg = small_config();
  Fixture f = make_fixture(200, 40, 4, {1.0, 0.0, 0.0});
  ModelState model = init_model(cfg, 10);
  model.param("sample.out.bias").value[0] = std::numeric_limits<double>::infinity();
  Trainer trainer(std::move(model), f.manifest, f.corpus, quiet_config());
  try {
    trainer.step_once();
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumeric);
  }
}

TEST_CASE("evaluate is pure and exact for a uniform model") {
  const ModelConfig cfg = small_config();
  Fixture f = make_fixture(600, 60, 12, {0.5, 0.25, 0.25});
  const ModelState model = init_model(cfg, 11);
  const double a = evaluate(model, f.manifest, Split::kValid, f.corpus);
  const double b = evaluate(model, f.manifest, Split::kValid, f.corpus);
  CHECK(a == b);
  ModelState uniform = init_model(cfg, 11);
  for (auto& p : uniform.params) {
    const bool direction = p.name.ends_with(".v");
    if (!direction && p.name != "sample.embedding") p.value.fill(0.0);
  }
  CHECK(evaluate(uniform, f.manifest, Split::kTest, f.corpus) ==
        doctest::Approx(std::log2(32.0)).epsilon(1e-14));
  CHECK_THROWS_AS(evaluate(model, make_fixture(600, 60, 4, {1.0, 0.0, 0.0}).manifest,
                           Split::kValid, f.corpus),
                  Error);
}

TEST_CASE("checkpoint encode and decode round trip") {
  const ModelConfig cfg = small_config();
  Fixture f = make_fixture(400, 60, 6, {1.0, 0.0, 0.0});
  Trainer trainer(init_model(cfg, 12), f.manifest, f.corpus, quiet_config());
  trainer.step_once();
  const Checkpoint ckpt = trainer.checkpoint();
  CHECK(ckpt.carry.batch() == 3);  // mid-chunk: state carried
  const Checkpoint back = decode_checkpoint(encode_checkpoint(ckpt));
  CHECK(back.config_text == ckpt.config_text);
  CHECK(same_params(back.model, ckpt.model));
  CHECK(back.model.config == ckpt.model.config);
  CHECK(back.adam == ckpt.adam);
  CHECK(back.rng_state == ckpt.rng_state);
  CHECK(back.epoch == ckpt.epoch);
  CHECK(back.step == ckpt.step);
  CHECK(back.loss_sum == ckpt.loss_sum);
  CHECK(back.loss_count == ckpt.loss_count);
  CHECK(back.carry == ckpt.carry);
  CHECK(encode_checkpoint(back) == encode_checkpoint(ckpt));
}

TEST_CASE("checkpoint file round trip gives identical logits") {
  testing::TempDir dir("ckpt");
  const ModelConfig cfg = small_config();
  Checkpoint ckpt;
  ckpt.model = init_model(cfg, 13);
  ckpt.adam = AdamState::zeros_like(ckpt.model.parameter_ptrs());
  ckpt.config_text = canonical_config_text({cfg, AdamConfig{}, 1});
  save_checkpoint(dir / "a.ckpt", ckpt);
  const Checkpoint back = load_checkpoint(dir / "a.ckpt");
  Rng rng(14);
  std::vector<int> window(cfg.tbptt_len + cfg.frame_size);
  for (int& v : window) v = static_cast<int>(rng.below(cfg.q_levels));
  const auto zero = RecurrentState::zeros(cfg, 1);
  CHECK(forward_window(ckpt.model, window, 1, zero).logits ==
        forward_window(back.model, window, 1, zero).logits);
}

TEST_CASE("checkpoint decode errors") {
  const ModelConfig cfg = small_config();
  Checkpoint ckpt;
  ckpt.model = init_model(cfg, 15);
  ckpt.adam = AdamState::zeros_like(ckpt.model.parameter_ptrs());
  ckpt.config_text = canonical_config_text({cfg, AdamConfig{}, 1});
  const auto bytes = encode_checkpoint(ckpt);

  auto bad = bytes;
  bad[0] = 'X';
  try {
    decode_checkpoint(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFormat);
    CHECK(std::string(e.what()).find("not a checkpoint") != std::string::npos);
  }

  auto version = bytes;
  version[8] = 99;
  try {
    decode_checkpoint(version);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupported);
  }

  for (size_t cut : {size_t(4), size_t(20), bytes.size() / 2, bytes.size() - 1}) {
    std::vector<uint8_t> truncated(bytes.begin(), bytes.begin() + cut);
    CHECK_THROWS_AS(decode_checkpoint(truncated), Error);
  }

  try {
    load_checkpoint("/nonexistent/srnn.ckpt");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotFound);
  }
}

TEST_CASE("canonical config text round trips") {
  CheckpointConfig c{small_config(), AdamConfig{}, 77};
  c.adam.lr = 3e-4;
  const std::string text = canonical_config_text(c);
  const CheckpointConfig back = parse_checkpoint_config(text);
  CHECK(back.model == c.model);
  CHECK(back.adam.lr == c.adam.lr);
  CHECK(back.seed == 77);
  CHECK(canonical_config_text(back) == text);
}

TEST_CASE("resume at any interruption point matches an uninterrupted run") {
  const ModelConfig cfg = small_config();
  // 7 train chunks of 60 samples: 3 windows each, 3 batches, 9 steps per epoch.
  Fixture f = make_fixture(500, 60, 10, {0.7, 0.1, 0.2});
  TrainConfig tc = quiet_config();
  tc.epochs = 3;
  Trainer straight(init_model(cfg, 16), f.manifest, f.corpus, tc);
  REQUIRE(straight.steps_per_epoch() == 9);
  const uint64_t total = 3 * 9;
  for (uint64_t s = 0; s < total; ++s) straight.step_once();

  for (uint64_t cut : {1u, 2u, 3u, 8u, 9u, 10u, 17u, 26u}) {
    Trainer first(init_model(cfg, 16), f.manifest, f.corpus, tc);
    for (uint64_t s = 0; s < cut; ++s) first.step_once();
    const Checkpoint ckpt = decode_checkpoint(encode_checkpoint(first.checkpoint()));
    Trainer second = Trainer::resume(ckpt, f.manifest, f.corpus, tc);
    for (uint64_t s = cut; s < total; ++s) second.step_once();
    INFO("interrupted after step " << cut);
    CHECK(same_params(second.model(), straight.model()));
    CHECK(second.optimizer() == straight.optimizer());
    CHECK(second.checkpoint().rng_state == straight.checkpoint().rng_state);
  }
}

TEST_CASE("resume refuses a different config") {
  const ModelConfig cfg = small_config();
  Fixture f = make_fixture(400, 60, 6, {1.0, 0.0, 0.0});
  Trainer t(init_model(cfg, 17), f.manifest, f.corpus, quiet_config(1));
  t.step_once();
  TrainConfig other = quiet_config(1);
  other.adam.lr = 5e-3;
  try {
    Trainer::resume(t.checkpoint(), f.manifest, f.corpus, other);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
    CHECK(std::string(e.what()).find("hash") != std::string::npos);
  }
}

TEST_CASE("run writes checkpoints, previews and a report") {
  testing::TempDir dir("train_run");
  const ModelConfig cfg = small_config();
  Fixture f = make_fixture(500, 60, 10, {0.7, 0.1, 0.2});
  TrainConfig tc = quiet_config();
  tc.epochs = 2;
  tc.steps_per_checkpoint = 4;
  tc.preview_seconds = 0.05;
  Trainer trainer(init_model(cfg, 18), f.manifest, f.corpus, tc);
  trainer.set_output_dir(dir.path());
  const TrainReport report = trainer.run();
  CHECK(report.total_steps == 18);
  const auto ck = dir.path() / "checkpoints";
  for (const char* name : {"epoch0_step4", "epoch0_step8", "epoch1_step9", "epoch1_step12",
                           "epoch1_step16", "epoch2_step18"}) {
    CHECK(std::filesystem::exists(ck / (std::string(name) + ".ckpt")));
    CHECK(std::filesystem::exists(dir.path() / "previews" / (std::string(name) + ".wav")));
  }
  CHECK(std::filesystem::exists(dir.path() / "final.ckpt"));
  const std::string tsv = read_text_file(dir.path() / "report.tsv");
  CHECK(tsv.rfind("epoch\tsteps\ttrain_bits\tvalid_bits\n", 0) == 0);
  CHECK(load_checkpoint(dir.path() / "final.ckpt").step == 18);
}

TEST_CASE("max_steps stops early and says so") {
  testing::TempDir dir("train_max");
  const ModelConfig cfg = small_config();
  Fixture f = make_fixture(500, 60, 10, {1.0, 0.0, 0.0});
  TrainConfig tc = quiet_config();
  tc.epochs = 5;
  tc.max_steps = 7;
  Trainer trainer(init_model(cfg, 19), f.manifest, f.corpus, tc);
  trainer.set_output_dir(dir.path());
  const TrainReport report = trainer.run();
  CHECK(report.total_steps == 7);
  CHECK_FALSE(report.finished);
  CHECK(std::filesystem::exists(dir.path() / "checkpoints" / "epoch0_step7.ckpt"));
}

TEST_CASE("train config validation") {
  TrainConfig tc;
  tc.epochs = 0;
  CHECK_THROWS_AS(tc.validate(), Error);
  tc = {};
  tc.adam.beta2 = 1.0;
  CHECK_THROWS_AS(tc.validate(), Error);
  tc = {};
  tc.adam.lr = 0.0;
  CHECK_THROWS_AS(tc.validate(), Error);
}
