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

#include "core/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <map>
#include <sstream>

#include "core/error.hpp"
#include "core/util.hpp"

namespace srnn {
namespace {

constexpr char kMagic[8] = {'S', 'R', 'N', 'N', 'C', 'K', 'P', 'T'};
constexpr char kCarryTag[4] = {'C', 'A', 'R', 'Y'};

class Writer {
 public:
  void bytes(const void* data, size_t n) {
    const auto* p = static_cast<const uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void u32(uint32_t v) {
    for (int s = 0; s < 32; s += 8) out_.push_back(static_cast<uint8_t>(v >> s));
  }
  void u64(uint64_t v) {
    for (int s = 0; s < 64; s += 8) out_.push_back(static_cast<uint8_t>(v >> s));
  }
  void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
  void tensor(const std::string& name, const Tensor& t) {
    u32(static_cast<uint32_t>(name.size()));
    bytes(name.data(), name.size());
    u32(static_cast<uint32_t>(t.rank()));
    for (size_t d : t.shape()) u32(static_cast<uint32_t>(d));
    for (double x : t.values()) f64(x);
  }
  std::vector<uint8_t> take() { return std::move(out_); }

 private:
  std::vector<uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> data) : data_(data) {}

  bool at_end() const { return pos_ == data_.size(); }
  size_t remaining() const { return data_.size() - pos_; }

  const uint8_t* take(size_t n) {
    if (n > remaining()) throw Error(ErrorCode::kFormat, "checkpoint is truncated");
    const uint8_t* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }
  uint32_t u32() {
    const uint8_t* p = take(4);
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }
  uint64_t u64() {
    const uint8_t* p = take(8);
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string string(size_t n) {
    const uint8_t* p = take(n);
    return std::string(reinterpret_cast<const char*>(p), n);
  }
  std::pair<std::string, Tensor> tensor() {
    std::string name = string(u32());
    const uint32_t rank = u32();
    if (rank == 0 || rank > 8) throw Error(ErrorCode::kFormat, "checkpoint: bad tensor rank");
    Shape shape(rank);
    size_t count = 1;
    for (auto& d : shape) {
      d = u32();
      if (d == 0) throw Error(ErrorCode::kFormat, "checkpoint: zero tensor dimension");
      count *= d;
    }
    if (count > remaining() / 8) throw Error(ErrorCode::kFormat, "checkpoint is truncated");
    std::vector<double> data(count);
    for (double& x : data) x = f64();
    return {std::move(name), Tensor(std::move(shape), std::move(data))};
  }

 private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

void expect_tensor(const std::pair<std::string, Tensor>& got, const std::string& name,
                   const Shape& shape) {
  if (got.first != name) {
    throw Error(ErrorCode::kFormat,
                "checkpoint: expected tensor '" + name + "', found '" + got.first + "'");
  }
  if (got.second.shape() != shape) {
    throw Error(ErrorCode::kFormat, "checkpoint: tensor '" + name + "' has shape " +
                                        shape_string(got.second.shape()) + ", expected " +
                                        shape_string(shape));
  }
}

}  // namespace

std::string canonical_config_text(const CheckpointConfig& c) {
  std::ostringstream out;
  out << "model.q_levels = " << c.model.q_levels << '\n'
      << "model.embed_dim = " << c.model.embed_dim << '\n'
      << "model.hidden_dim = " << c.model.hidden_dim << '\n'
      << "model.n_rnn_layers = " << c.model.n_rnn_layers << '\n'
      << "model.frame_size = " << c.model.frame_size << '\n'
      << "model.sample_rate = " << c.model.sample_rate << '\n'
      << "model.tbptt_len = " << c.model.tbptt_len << '\n'
      << "model.batch_size = " << c.model.batch_size << '\n'
      << "train.lr = " << format_double(c.adam.lr) << '\n'
      << "train.beta1 = " << format_double(c.adam.beta1) << '\n'
      << "train.beta2 = " << format_double(c.adam.beta2) << '\n'
      << "train.eps = " << format_double(c.adam.eps) << '\n'
      << "train.clip_norm = " << format_double(c.adam.clip_norm) << '\n'
      << "train.seed = " << c.seed << '\n';
  return out.str();
}

CheckpointConfig parse_checkpoint_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  for (auto& entry : parse_key_values(text)) kv[entry.key] = entry.value;
  const auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      throw Error(ErrorCode::kFormat, std::string("checkpoint config missing ") + key);
    }
    return it->second;
  };
  const auto get_int = [&](const char* key) {
    const auto v = parse_i64(get(key));
    if (!v) throw Error(ErrorCode::kFormat, std::string("checkpoint config: bad ") + key);
    return *v;
  };
  const auto get_double = [&](const char* key) {
    const auto v = parse_double(get(key));
    if (!v) throw Error(ErrorCode::kFormat, std::string("checkpoint config: bad ") + key);
    return *v;
  };
  CheckpointConfig c;
  c.model.q_levels = static_cast<int>(get_int("model.q_levels"));
  c.model.embed_dim = static_cast<int>(get_int("model.embed_dim"));
  c.model.hidden_dim = static_cast<int>(get_int("model.hidden_dim"));
  c.model.n_rnn_layers = static_cast<int>(get_int("model.n_rnn_layers"));
  c.model.frame_size = static_cast<int>(get_int("model.frame_size"));
  c.model.sample_rate = static_cast<uint32_t>(get_int("model.sample_rate"));
  c.model.tbptt_len = static_cast<int>(get_int("model.tbptt_len"));
  c.model.batch_size = static_cast<int>(get_int("model.batch_size"));
  c.adam.lr = get_double("train.lr");
  c.adam.beta1 = get_double("train.beta1");
  c.adam.beta2 = get_double("train.beta2");
  c.adam.eps = get_double("train.eps");
  c.adam.clip_norm = get_double("train.clip_norm");
  const auto seed = parse_u64(get("train.seed"));
  if (!seed) throw Error(ErrorCode::kFormat, "checkpoint config: bad train.seed");
  c.seed = *seed;
  try {
    c.model.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormat, std::string("checkpoint config invalid: ") + e.what());
  }
  return c;
}

uint64_t Checkpoint::config_hash() const { return fnv1a64(config_text); }

std::vector<uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kCheckpointVersion);
  w.u64(ckpt.config_text.size());
  w.bytes(ckpt.config_text.data(), ckpt.config_text.size());

  const auto& params = ckpt.model.params;
  w.u32(static_cast<uint32_t>(params.size()));
  for (const auto& p : params) w.tensor(p.name, p.value);

  if (ckpt.adam.m.size() != params.size() || ckpt.adam.v.size() != params.size()) {
    throw Error(ErrorCode::kInvalidArgument, "checkpoint: optimizer state does not match model");
  }
  w.u32(static_cast<uint32_t>(2 * params.size()));
  for (size_t k = 0; k < params.size(); ++k) {
    w.tensor("adam.m/" + params[k].name, ckpt.adam.m[k]);
    w.tensor("adam.v/" + params[k].name, ckpt.adam.v[k]);
  }
  w.u64(ckpt.adam.t);
  w.u64(ckpt.rng_state);
  w.u32(ckpt.epoch);
  w.u64(ckpt.step);

  w.bytes(kCarryTag, sizeof(kCarryTag));
  w.f64(ckpt.loss_sum);
  w.u64(ckpt.loss_count);
  w.u32(static_cast<uint32_t>(ckpt.carry.h.size() + ckpt.carry.c.size()));
  for (size_t l = 0; l < ckpt.carry.h.size(); ++l) {
    w.tensor("carry.h" + std::to_string(l), ckpt.carry.h[l]);
    w.tensor("carry.c" + std::to_string(l), ckpt.carry.c[l]);
  }
  return w.take();
}

Checkpoint decode_checkpoint(std::span<const uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kFormat, "not a checkpoint (bad magic bytes)");
  }
  Reader r(bytes);
  r.take(sizeof(kMagic));
  const uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kUnsupported,
                "checkpoint version " + std::to_string(version) + " is not supported");
  }
  Checkpoint ckpt;
  const uint64_t text_len = r.u64();
  if (text_len > r.remaining()) throw Error(ErrorCode::kFormat, "checkpoint is truncated");
  ckpt.config_text = r.string(text_len);
  const CheckpointConfig config = parse_checkpoint_config(ckpt.config_text);
  ckpt.model.config = config.model;

  const auto shapes = parameter_shapes(config.model);
  const uint32_t n_params = r.u32();
  if (n_params != shapes.size()) {
    throw Error(ErrorCode::kFormat, "checkpoint has " + std::to_string(n_params) +
                                        " parameters, config implies " +
                                        std::to_string(shapes.size()));
  }
  for (const auto& [name, shape] : shapes) {
    auto t = r.tensor();
    expect_tensor(t, name, shape);
    ckpt.model.params.emplace_back(name, std::move(t.second));
  }

  const uint32_t n_adam = r.u32();
  if (n_adam != 2 * shapes.size()) {
    throw Error(ErrorCode::kFormat, "checkpoint optimizer state has wrong tensor count");
  }
  for (const auto& [name, shape] : shapes) {
    auto m = r.tensor();
    expect_tensor(m, "adam.m/" + name, shape);
    auto v = r.tensor();
    expect_tensor(v, "adam.v/" + name, shape);
    ckpt.adam.m.push_back(std::move(m.second));
    ckpt.adam.v.push_back(std::move(v.second));
  }
  ckpt.adam.t = r.u64();
  ckpt.rng_state = r.u64();
  ckpt.epoch = r.u32();
  ckpt.step = r.u64();

  if (!r.at_end()) {
    if (std::memcmp(r.take(4), kCarryTag, 4) != 0) {
      throw Error(ErrorCode::kFormat, "checkpoint: unknown trailing section");
    }
    ckpt.loss_sum = r.f64();
    ckpt.loss_count = r.u64();
    const uint32_t n_carry = r.u32();
    if (n_carry != 0 && n_carry != 2u * config.model.n_rnn_layers) {
      throw Error(ErrorCode::kFormat, "checkpoint: carried state has wrong layer count");
    }
    for (uint32_t l = 0; l < n_carry / 2; ++l) {
      auto h = r.tensor();
      auto c = r.tensor();
      if (h.second.rank() != 2 || h.second.cols() != static_cast<size_t>(config.model.hidden_dim) ||
          c.second.shape() != h.second.shape()) {
        throw Error(ErrorCode::kFormat, "checkpoint: carried state has wrong shape");
      }
      ckpt.carry.h.push_back(std::move(h.second));
      ckpt.carry.c.push_back(std::move(c.second));
    }
    if (!r.at_end()) throw Error(ErrorCode::kFormat, "checkpoint: trailing bytes");
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_file_atomic(path, encode_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kNotFound, "checkpoint not found: " + path.string());
  }
  return decode_checkpoint(read_binary_file(path));
}

}  // namespace srnn
