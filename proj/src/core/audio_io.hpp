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
#include <span>
#include <vector>

namespace srnn {

// Mono audio with amplitudes in [-1, 1].
class AudioClip {
 public:
  AudioClip() = default;
  // Throws kInvalidArgument if sample_rate is zero or any sample lies
  // outside [-1, 1] (NaN included).
  AudioClip(std::vector<double> samples, uint32_t sample_rate);

  std::span<const double> samples() const { return samples_; }
  uint32_t sample_rate() const { return sample_rate_; }
  size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double duration_seconds() const {
    return sample_rate_ ? static_cast<double>(samples_.size()) / sample_rate_ : 0.0;
  }

  friend bool operator==(const AudioClip&, const AudioClip&) = default;

 private:
  std::vector<double> samples_;
  uint32_t sample_rate_ = 0;
};

// x = v / 32767 clamped to [-1, 1]; -32768 maps to -1.
double pcm16_to_float(int16_t v);

// round(clamp(x, -1, 1) * 32767), ties away from zero. NaN maps to 0.
int16_t float_to_pcm16(double x);

// Reads a RIFF/WAVE file with PCM format code 1 and 16-bit samples. Any
// channel count is accepted; channels are averaged per frame. Unknown chunks
// are skipped. Errors: kNotFound (missing file), kFormat (malformed RIFF),
// kUnsupported (other format code or bit depth).
AudioClip load_wav(const std::filesystem::path& path);

// Writes 16-bit mono little-endian PCM. Throws kIo if the path is unwritable.
void save_wav(const AudioClip& clip, const std::filesystem::path& path);

// Byte image of the WAV file save_wav would write.
std::vector<uint8_t> encode_wav(const AudioClip& clip);

}  // namespace srnn
