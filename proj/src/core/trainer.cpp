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

#include "core/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "core/error.hpp"
#include "core/generator.hpp"
#include "core/quantizer.hpp"
#include "core/util.hpp"

namespace srnn {
namespace {

std::vector<int> chunk_levels(const ChunkRecord& rec, const Corpus& corpus, int q_levels) {
  const auto it = corpus.find(rec.source);
  if (it == corpus.end()) {
    throw Error(ErrorCode::kNotFound, "corpus has no audio for source " + rec.source);
  }
  const auto samples = it->second.samples();
  if (rec.start + rec.length > samples.size()) {
    throw Error(ErrorCode::kInvalidArgument, "chunk at " + std::to_string(rec.start) +
                                                 " runs past the end of " + rec.source);
  }
  return quantize_all(samples.subspan(rec.start, rec.length), q_levels);
}

size_t windows_in(size_t chunk_len, const ModelConfig& cfg) {
  const size_t fs = cfg.frame_size, t = cfg.tbptt_len;
  if (chunk_len < t + fs) {
    throw Error(ErrorCode::kInvalidArgument,
                "chunk of " + std::to_string(chunk_len) +
                    " samples is shorter than one window (tbptt_len + frame_size = " +
                    std::to_string(t + fs) + ")");
  }
  return (chunk_len - fs) / t;
}

// Rows [offset, offset + T + FS) of each chunk, concatenated.
std::vector<int> assemble_window(const std::vector<const std::vector<int>*>& rows,
                                 size_t offset, size_t length) {
  std::vector<int> window;
  window.reserve(rows.size() * length);
  for (const auto* chunk : rows) {
    window.insert(window.end(), chunk->begin() + offset, chunk->begin() + offset + length);
  }
  return window;
}

}  // namespace

void TrainConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string("train config: ") + what);
  };
  require(epochs > 0, "epochs must be positive");
  require(preview_seconds >= 0.0, "preview_seconds must be >= 0");
  require(preview_temperature > 0.0, "preview_temperature must be > 0");
  require(preview_h0_sigma >= 0.0, "preview_h0_sigma must be >= 0");
  require(adam.lr > 0.0, "lr must be > 0");
  require(adam.beta1 >= 0.0 && adam.beta1 < 1.0, "beta1 must be in [0, 1)");
  require(adam.beta2 >= 0.0 && adam.beta2 < 1.0, "beta2 must be in [0, 1)");
  require(adam.eps > 0.0, "eps must be > 0");
}

Corpus load_corpus(const DatasetManifest& manifest, const std::filesystem::path& base_dir) {
  Corpus corpus;
  for (const auto& rec : manifest.records) {
    if (corpus.contains(rec.source)) continue;
    std::filesystem::path path(rec.source);
    if (path.is_relative()) path = base_dir / path;
    AudioClip clip = load_wav(path);
    if (clip.sample_rate() != manifest.sample_rate) {
      throw Error(ErrorCode::kInvalidArgument, "source " + rec.source + " has sample rate " +
                                                   std::to_string(clip.sample_rate()) +
                                                   ", manifest says " +
                                                   std::to_string(manifest.sample_rate));
    }
    corpus.emplace(rec.source, std::move(clip));
  }
  return corpus;
}

double evaluate(const ModelState& model, const DatasetManifest& manifest, Split split,
                const Corpus& corpus) {
  const ModelConfig& cfg = model.config;
  const auto records = manifest.split_records(split);
  if (records.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("split '") + split_name(split) + "' has no chunks");
  }
  std::vector<std::vector<int>> chunks;
  for (const auto& rec : records) chunks.push_back(chunk_levels(rec, corpus, cfg.q_levels));
  const size_t wpc = windows_in(chunks.front().size(), cfg);
  const size_t seq_len = cfg.tbptt_len + cfg.frame_size;
  const size_t batch_size = cfg.batch_size;

  double total_nats = 0.0;
  size_t predicted = 0;
  for (size_t first = 0; first < chunks.size(); first += batch_size) {
    const size_t last = std::min(chunks.size(), first + batch_size);
    std::vector<const std::vector<int>*> rows;
    for (size_t i = first; i < last; ++i) rows.push_back(&chunks[i]);
    RecurrentState state = RecurrentState::zeros(cfg, rows.size());
    for (size_t w = 0; w < wpc; ++w) {
      const auto window = assemble_window(rows, w * cfg.tbptt_len, seq_len);
      WindowOutput out = forward_window(model, window, rows.size(), state);
      const size_t n = out.targets.size();
      total_nats += out.loss_nats * static_cast<double>(n);
      predicted += n;
      state = std::move(out.state);
    }
  }
  return total_nats / static_cast<double>(predicted) / std::numbers::ln2;
}

Trainer::Trainer(ModelState model, const DatasetManifest& manifest, const Corpus& corpus,
                 TrainConfig config)
    : model_(std::move(model)), config_(std::move(config)) {
  config_.validate();
  model_.config.validate();
  adam_ = AdamState::zeros_like(model_.parameter_ptrs());
  rng_.set_state(splitmix64_once(config_.seed + 1));
  epoch_start_rng_ = rng_.state();
  prepare(manifest, corpus);
}

Trainer Trainer::resume(const Checkpoint& checkpoint, const DatasetManifest& manifest,
                        const Corpus& corpus, TrainConfig config) {
  Trainer trainer(checkpoint.model, manifest, corpus, std::move(config));
  if (trainer.config_text() != checkpoint.config_text) {
    throw Error(ErrorCode::kInvalidArgument,
                "config hash mismatch on resume: checkpoint " + hex64(checkpoint.config_hash()) +
                    ", run " + hex64(fnv1a64(trainer.config_text())));
  }
  trainer.adam_ = checkpoint.adam;
  trainer.epoch_ = checkpoint.epoch;
  trainer.step_ = checkpoint.step;
  trainer.epoch_start_rng_ = checkpoint.rng_state;
  trainer.rng_.set_state(checkpoint.rng_state);
  trainer.loss_sum_ = checkpoint.loss_sum;
  trainer.loss_count_ = checkpoint.loss_count;
  trainer.carry_ = checkpoint.carry;
  if (trainer.step_ < static_cast<uint64_t>(trainer.epoch_) * trainer.steps_per_epoch_ ||
      trainer.step_ > static_cast<uint64_t>(trainer.epoch_ + 1) * trainer.steps_per_epoch_) {
    throw Error(ErrorCode::kInvalidArgument,
                "checkpoint step count is inconsistent with this manifest");
  }
  const Position pos = trainer.position();
  if (pos.window != 0 && trainer.carry_.h.empty()) {
    throw Error(ErrorCode::kFormat, "checkpoint stopped mid-chunk but has no carried state");
  }
  return trainer;
}

std::string Trainer::config_text() const {
  return canonical_config_text({model_.config, config_.adam, config_.seed});
}

void Trainer::prepare(const DatasetManifest& manifest, const Corpus& corpus) {
  manifest_ = &manifest;
  corpus_ = &corpus;
  for (const auto& rec : manifest.split_records(Split::kTrain)) {
    chunks_.push_back(chunk_levels(rec, corpus, model_.config.q_levels));
  }
  if (chunks_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "manifest has no training chunks");
  }
  windows_per_chunk_ = windows_in(chunks_.front().size(), model_.config);
  const size_t b = model_.config.batch_size;
  n_batches_ = (chunks_.size() + b - 1) / b;
  steps_per_epoch_ = static_cast<uint64_t>(n_batches_) * windows_per_chunk_;
}

void Trainer::draw_epoch_order() {
  rng_.set_state(epoch_start_rng_);
  order_.resize(chunks_.size());
  for (size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  for (size_t i = order_.size() - 1; i >= 1; --i) std::swap(order_[i], order_[rng_.below(i + 1)]);
  order_ready_ = true;
}

Trainer::Position Trainer::position() const {
  const uint64_t in_epoch = step_ - static_cast<uint64_t>(epoch_) * steps_per_epoch_;
  return {static_cast<size_t>(in_epoch / windows_per_chunk_),
          static_cast<size_t>(in_epoch % windows_per_chunk_)};
}

double Trainer::train_window(const Position& pos) {
  const ModelConfig& cfg = model_.config;
  const size_t b = cfg.batch_size;
  const size_t first = pos.batch * b;
  const size_t last = std::min(chunks_.size(), first + b);
  std::vector<const std::vector<int>*> rows;
  for (size_t i = first; i < last; ++i) rows.push_back(&chunks_[order_[i]]);
  if (pos.window == 0) carry_ = RecurrentState::zeros(cfg, rows.size());

  const auto window = assemble_window(rows, pos.window * cfg.tbptt_len,
                                      static_cast<size_t>(cfg.tbptt_len + cfg.frame_size));
  model_.zero_grad();
  const double loss = accumulate_window_gradients(model_, window, rows.size(), carry_);
  if (!std::isfinite(loss)) {
    throw Error(ErrorCode::kNumeric, "non-finite loss at epoch " + std::to_string(epoch_) +
                                         ", step " + std::to_string(step_) + " (batch " +
                                         std::to_string(pos.batch) + ", window " +
                                         std::to_string(pos.window) + ")");
  }
  adam_step(model_.parameter_ptrs(), adam_, config_.adam);
  ++step_;
  loss_sum_ += loss / std::numbers::ln2;
  ++loss_count_;
  if (pos.window + 1 == windows_per_chunk_) carry_ = RecurrentState();
  return loss / std::numbers::ln2;
}

double Trainer::step_once() {
  if (!order_ready_) draw_epoch_order();
  const double bits = train_window(position());
  if (step_ == static_cast<uint64_t>(epoch_ + 1) * steps_per_epoch_) {
    TrainReport scratch;
    finish_epoch(scratch);
  }
  return bits;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint ckpt;
  ckpt.config_text = config_text();
  ckpt.model = model_;
  ckpt.adam = adam_;
  ckpt.rng_state = epoch_start_rng_;
  ckpt.epoch = epoch_;
  ckpt.step = step_;
  ckpt.loss_sum = loss_sum_;
  ckpt.loss_count = loss_count_;
  ckpt.carry = carry_;
  return ckpt;
}

void Trainer::write_checkpoint(bool with_preview) {
  if (out_dir_.empty()) return;
  const std::string stem = "epoch" + std::to_string(epoch_) + "_step" + std::to_string(step_);
  std::filesystem::create_directories(out_dir_ / "checkpoints");
  last_checkpoint_ = out_dir_ / "checkpoints" / (stem + ".ckpt");
  save_checkpoint(last_checkpoint_, checkpoint());
  if (with_preview && config_.preview_seconds > 0.0) {
    std::filesystem::create_directories(out_dir_ / "previews");
    GenParams params;
    params.n_samples = std::max<size_t>(
        model_.config.frame_size,
        static_cast<size_t>(std::llround(config_.preview_seconds * model_.config.sample_rate)));
    params.temperature = config_.preview_temperature;
    params.h0_sigma = config_.preview_h0_sigma;
    params.seed = splitmix64_once(config_.seed + step_);
    save_wav(generate(model_, params), out_dir_ / "previews" / (stem + ".wav"));
  }
}

void Trainer::finish_epoch(TrainReport& report) {
  EpochStats stats;
  stats.epoch = epoch_;
  stats.steps = step_;
  stats.train_bits = loss_count_ ? loss_sum_ / static_cast<double>(loss_count_) : 0.0;
  if (!manifest_->split_records(Split::kValid).empty()) {
    stats.valid_bits = evaluate(model_, *manifest_, Split::kValid, *corpus_);
  }
  report.epochs.push_back(stats);
  ++epoch_;
  epoch_start_rng_ = rng_.state();
  order_ready_ = false;
  loss_sum_ = 0.0;
  loss_count_ = 0;
  carry_ = RecurrentState();
}

TrainReport Trainer::run() {
  const auto start = std::chrono::steady_clock::now();
  TrainReport report;
  const auto limit_reached = [this] { return config_.max_steps && step_ >= config_.max_steps; };

  while (epoch_ < static_cast<uint32_t>(config_.epochs) && !limit_reached()) {
    draw_epoch_order();
    const uint64_t epoch_end = static_cast<uint64_t>(epoch_ + 1) * steps_per_epoch_;
    while (step_ < epoch_end) {
      train_window(position());
      if (step_ == epoch_end) break;
      if (limit_reached()) break;
      if (config_.steps_per_checkpoint && step_ % config_.steps_per_checkpoint == 0) {
        write_checkpoint(true);
      }
    }
    if (step_ < epoch_end) {
      // Stopped by max_steps inside an epoch.
      write_checkpoint(true);
      break;
    }
    finish_epoch(report);
    write_checkpoint(true);
  }

  report.total_steps = step_;
  report.finished = epoch_ >= static_cast<uint32_t>(config_.epochs);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out_dir_.empty()) {
    const auto final_path = out_dir_ / "final.ckpt";
    save_checkpoint(final_path, checkpoint());
    last_checkpoint_ = final_path;
    write_train_report(report, out_dir_ / "report.tsv");
  }
  return report;
}

void write_train_report(const TrainReport& report, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "epoch\tsteps\ttrain_bits\tvalid_bits\n";
  for (const auto& e : report.epochs) {
    out << e.epoch << '\t' << e.steps << '\t' << format_double(e.train_bits) << '\t'
        << (e.valid_bits ? format_double(*e.valid_bits) : "-") << '\n';
  }
  out << "# total_steps=" << report.total_steps << " finished=" << (report.finished ? 1 : 0)
      << " wall_seconds=" << format_double(report.wall_seconds) << '\n';
  write_file_atomic(path, out.str());
}

}  // namespace srnn
