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

#include "core/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

#include "core/error.hpp"

namespace srnn {
namespace {

constexpr uint16_t kFormatPcm = 1;

uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<uint8_t>(v >> shift));
}

void put_tag(std::vector<uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct FormatChunk {
  uint16_t format_code = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits_per_sample = 0;
};

[[noreturn]] void malformed(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::kFormat, "malformed WAV '" + path.string() + "': " + what);
}

}  // namespace

AudioClip::AudioClip(std::vector<double> samples, uint32_t sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (sample_rate_ == 0) throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  for (double s : samples_) {
    if (!(s >= -1.0 && s <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "audio sample outside [-1, 1]");
    }
  }
}

double pcm16_to_float(int16_t v) {
  return std::clamp(static_cast<double>(v) / 32767.0, -1.0, 1.0);
}

int16_t float_to_pcm16(double x) {
  if (std::isnan(x)) return 0;
  return static_cast<int16_t>(std::round(std::clamp(x, -1.0, 1.0) * 32767.0));
}

AudioClip load_wav(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kNotFound, "audio file not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 12) malformed(path, "file shorter than RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0) malformed(path, "missing RIFF tag");
  if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) malformed(path, "missing WAVE tag");

  std::optional<FormatChunk> fmt;
  const uint8_t* data = nullptr;
  size_t data_size = 0;
  bool have_data = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* header = bytes.data() + pos;
    const uint32_t chunk_size = read_u32(header + 4);
    const size_t body = pos + 8;
    if (chunk_size > bytes.size() - body) {
      malformed(path, "chunk '" + std::string(reinterpret_cast<const char*>(header), 4) +
                          "' runs past end of file");
    }
    if (std::memcmp(header, "fmt ", 4) == 0) {
      if (chunk_size < 16) malformed(path, "fmt chunk too small");
      const uint8_t* f = bytes.data() + body;
      fmt = FormatChunk{read_u16(f), read_u16(f + 2), read_u32(f + 4), read_u16(f + 14)};
    } else if (std::memcmp(header, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = chunk_size;
      have_data = true;
    }
    // Chunks are word aligned.
    pos = body + chunk_size + (chunk_size & 1u);
  }

  if (!fmt) malformed(path, "no fmt chunk");
  if (!have_data) malformed(path, "no data chunk");
  if (fmt->format_code != kFormatPcm) {
    throw Error(ErrorCode::kUnsupported, "unsupported WAV format code " +
                                             std::to_string(fmt->format_code) + " in " +
                                             path.string() + " (only PCM = 1)");
  }
  if (fmt->bits_per_sample != 16) {
    throw Error(ErrorCode::kUnsupported, "unsupported WAV bit depth " +
                                             std::to_string(fmt->bits_per_sample) + " in " +
                                             path.string() + " (only 16-bit)");
  }
  if (fmt->channels == 0) malformed(path, "zero channels");
  if (fmt->sample_rate == 0) malformed(path, "zero sample rate");

  const size_t frame_bytes = 2u * fmt->channels;
  const size_t frames = data_size / frame_bytes;
  std::vector<double> samples(frames);
  for (size_t i = 0; i < frames; ++i) {
    const uint8_t* frame = data + i * frame_bytes;
    double sum = 0.0;
    for (size_t c = 0; c < fmt->channels; ++c) {
      sum += pcm16_to_float(static_cast<int16_t>(read_u16(frame + 2 * c)));
    }
    samples[i] = sum / fmt->channels;
  }
  return AudioClip(std::move(samples), fmt->sample_rate);
}

std::vector<uint8_t> encode_wav(const AudioClip& clip) {
  const uint32_t data_bytes = static_cast<uint32_t>(clip.size() * 2);
  std::vector<uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);                        // channels
  put_u32(out, clip.sample_rate());
  put_u32(out, clip.sample_rate() * 2);   // byte rate
  put_u16(out, 2);                        // block align
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double s : clip.samples()) put_u16(out, static_cast<uint16_t>(float_to_pcm16(s)));
  return out;
}

void save_wav(const AudioClip& clip, const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = encode_wav(clip);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace srnn
