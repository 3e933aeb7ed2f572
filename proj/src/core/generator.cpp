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

#include "core/generator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/error.hpp"
#include "core/quantizer.hpp"
#include "core/rng.hpp"
#include "core/util.hpp"

namespace srnn {

void GenParams::validate(const ModelConfig& config) const {
  if (!(temperature > 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be > 0");
  if (n_samples < static_cast<size_t>(config.frame_size)) {
    throw Error(ErrorCode::kInvalidArgument, "n_samples must be at least one frame");
  }
  if (!(h0_sigma >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "h0_sigma must be >= 0");
}

std::vector<double> sampling_distribution(std::span<const double> logits, double temperature) {
  if (logits.empty()) throw Error(ErrorCode::kInvalidArgument, "no logits");
  std::vector<double> probs(logits.size(), 0.0);
  const size_t best = static_cast<size_t>(
      std::max_element(logits.begin(), logits.end()) - logits.begin());
  if (temperature < kArgmaxTemperature) {
    probs[best] = 1.0;
    return probs;
  }
  const double mx = logits[best];
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp((logits[i] - mx) / temperature);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<int> generate_levels(const ModelState& model, const GenParams& params) {
  const ModelConfig& cfg = model.config;
  params.validate(cfg);
  const size_t fs = cfg.frame_size;
  const size_t hidden = cfg.hidden_dim;

  Rng rng(params.seed);
  RecurrentState state = RecurrentState::zeros(cfg, 1);
  for (size_t l = 0; l < state.h.size(); ++l) {
    for (double& x : state.h[l].values()) x = params.h0_sigma * rng.gaussian();
    for (double& x : state.c[l].values()) x = params.h0_sigma * rng.gaussian();
  }

  const InferenceSession session(model);
  std::vector<int> levels(params.n_samples, (cfg.q_levels - 1) / 2);
  Tensor conditioning;
  Tensor slot_cond({1, hidden});
  Tensor frame({1, fs});
  for (size_t p = fs; p < params.n_samples; ++p) {
    if (p % fs == 0) {
      for (size_t s = 0; s < fs; ++s) {
        frame[s] = dequantize_linear(levels[p - fs + s], cfg.q_levels);
      }
      conditioning = session.frame_step(frame, state);
    }
    const size_t slot = p % fs;
    std::copy_n(conditioning.data() + slot * hidden, hidden, slot_cond.data());
    const Tensor logits =
        session.sample_logits(std::span<const int>(levels.data() + p - fs, fs), slot_cond);
    const std::vector<double> probs = sampling_distribution(logits.values(), params.temperature);
    if (params.temperature < kArgmaxTemperature) {
      levels[p] = static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    } else {
      levels[p] = static_cast<int>(sample_categorical(probs, rng.uniform01()));
    }
  }
  return levels;
}

AudioClip generate(const ModelState& model, const GenParams& params) {
  const std::vector<int> levels = generate_levels(model, params);
  return AudioClip(dequantize_all(levels, model.config.q_levels), model.config.sample_rate);
}

std::vector<BatchRecord> generate_batch(const ModelState& model, const BatchOptions& options,
                                        const std::filesystem::path& out_dir) {
  if (options.n_clips == 0) throw Error(ErrorCode::kInvalidArgument, "n_clips must be >= 1");
  if (!(options.clip_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "clip_seconds must be > 0");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw Error(ErrorCode::kIo, "cannot create output directory " + out_dir.string());
  }
  GenParams params;
  params.n_samples = static_cast<size_t>(
      std::llround(options.clip_seconds * model.config.sample_rate));
  params.temperature = options.temperature;
  params.h0_sigma = options.h0_sigma;

  std::vector<BatchRecord> records;
  for (size_t k = 0; k < options.n_clips; ++k) {
    params.seed = options.base_seed + k;
    const AudioClip clip = generate(model, params);
    BatchRecord rec;
    rec.file = "gen_" + std::to_string(k) + ".wav";
    rec.seed = params.seed;
    rec.samples = clip.size();
    rec.sample_rate = clip.sample_rate();
    rec.checkpoint_id = options.checkpoint_id.empty() ? "-" : options.checkpoint_id;
    save_wav(clip, out_dir / rec.file);
    records.push_back(std::move(rec));
  }
  write_file_atomic(out_dir / kBatchIndexName, format_batch_index(records));
  return records;
}

std::string format_batch_index(const std::vector<BatchRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    out << r.file << '\t' << r.seed << '\t' << r.samples << '\t' << r.sample_rate << '\t'
        << r.checkpoint_id << '\n';
  }
  return out.str();
}

std::vector<BatchRecord> parse_batch_index(const std::string& text) {
  std::vector<BatchRecord> records;
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string where = "batch index line " + std::to_string(i + 1);
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto fields = split(line, '\t');
    if (fields.size() != 5) throw Error(ErrorCode::kFormat, where + ": expected 5 fields");
    const auto seed = parse_u64(fields[1]);
    const auto samples = parse_u64(fields[2]);
    const auto rate = parse_u64(fields[3]);
    if (fields[0].empty() || !seed || !samples || !rate || *rate == 0 || *rate > UINT32_MAX ||
        fields[4].empty()) {
      throw Error(ErrorCode::kFormat, where + ": bad field value");
    }
    records.push_back({std::string(fields[0]), *seed, *samples, static_cast<uint32_t>(*rate),
                       std::string(fields[4])});
  }
  return records;
}

std::vector<BatchRecord> read_batch_index(const std::filesystem::path& path) {
  return parse_batch_index(read_text_file(path));
}

std::vector<BatchRecord> select_random_tracks(const std::vector<BatchRecord>& batch, size_t k,
                                              uint64_t seed) {
  if (k > batch.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot select " + std::to_string(k) +
                                                 " tracks from a batch of " +
                                                 std::to_string(batch.size()));
  }
  std::vector<BatchRecord> pool = batch;
  Rng rng(seed);
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace srnn
