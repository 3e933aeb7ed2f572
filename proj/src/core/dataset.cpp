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

#include "core/dataset.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <sstream>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/util.hpp"

namespace srnn {
namespace {

size_t ms_to_samples(double ms, uint32_t sample_rate) {
  return static_cast<size_t>(std::llround(ms * sample_rate / 1000.0));
}

[[noreturn]] void manifest_error(size_t line, const std::string& what) {
  throw Error(ErrorCode::kFormat, "manifest line " + std::to_string(line) + ": " + what);
}

void validate_fractions(const SplitFractions& fractions) {
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "split fractions must be >= 0");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "split fractions must sum to 1");
  }
}

}  // namespace

void SilenceParams::validate() const {
  if (!(window_ms > 0.0)) throw Error(ErrorCode::kInvalidArgument, "silence.window_ms must be > 0");
  if (!(min_run_ms >= window_ms)) {
    throw Error(ErrorCode::kInvalidArgument, "silence.min_run_ms must be >= silence.window_ms");
  }
  if (!std::isfinite(threshold_dbfs)) {
    throw Error(ErrorCode::kInvalidArgument, "silence.threshold_dbfs must be finite");
  }
}

const char* split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
    case Split::kValid: return "valid";
  }
  return "?";
}

Split parse_split(const std::string& token) {
  if (token == "train") return Split::kTrain;
  if (token == "test") return Split::kTest;
  if (token == "valid") return Split::kValid;
  throw Error(ErrorCode::kFormat, "unknown split '" + token + "'");
}

std::vector<ChunkRecord> DatasetManifest::split_records(Split split) const {
  std::vector<ChunkRecord> out;
  for (const auto& r : records) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

AudioClip remove_silence(const AudioClip& clip, const SilenceParams& params) {
  params.validate();
  const auto samples = clip.samples();
  const size_t window = std::max<size_t>(1, ms_to_samples(params.window_ms, clip.sample_rate()));
  const size_t min_run = ms_to_samples(params.min_run_ms, clip.sample_rate());
  const double threshold = std::pow(10.0, params.threshold_dbfs / 20.0);

  const size_t n_windows = (samples.size() + window - 1) / window;
  std::vector<bool> silent(n_windows);
  for (size_t w = 0; w < n_windows; ++w) {
    const size_t begin = w * window;
    const size_t end = std::min(samples.size(), begin + window);
    double energy = 0.0;
    for (size_t i = begin; i < end; ++i) energy += samples[i] * samples[i];
    silent[w] = std::sqrt(energy / static_cast<double>(end - begin)) < threshold;
  }

  std::vector<double> kept;
  kept.reserve(samples.size());
  size_t w = 0;
  while (w < n_windows) {
    size_t run_end = w;
    while (run_end < n_windows && silent[run_end] == silent[w]) ++run_end;
    const size_t begin = w * window;
    const size_t end = std::min(samples.size(), run_end * window);
    const bool drop = silent[w] && (end - begin) >= min_run;
    if (!drop) kept.insert(kept.end(), samples.begin() + begin, samples.begin() + end);
    w = run_end;
  }
  return AudioClip(std::move(kept), clip.sample_rate());
}

size_t chunk_length(double chunk_seconds, uint32_t sample_rate) {
  return static_cast<size_t>(std::llround(chunk_seconds * sample_rate));
}

std::vector<ChunkSpan> chunk(const AudioClip& clip, double chunk_seconds, size_t n_chunks) {
  if (!(chunk_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "chunk_seconds must be > 0");
  }
  if (n_chunks == 0) throw Error(ErrorCode::kInvalidArgument, "n_chunks must be positive");
  const size_t length = clip.size();
  const size_t c = chunk_length(chunk_seconds, clip.sample_rate());
  if (c == 0) throw Error(ErrorCode::kInvalidArgument, "chunk length rounds to zero samples");
  if (length < c) {
    throw Error(ErrorCode::kInvalidArgument,
                "clip has " + std::to_string(length) + " samples, shorter than one chunk of " +
                    std::to_string(c));
  }
  if (n_chunks == 1 || length == c) return {ChunkSpan{0, c}};

  const size_t hop = (length - c) / (n_chunks - 1);
  std::vector<ChunkSpan> out;
  if (hop >= 1) {
    out.reserve(n_chunks);
    for (size_t k = 0; k < n_chunks; ++k) out.push_back({k * hop, c});
  } else {
    out.reserve(length - c + 1);
    for (size_t s = 0; s + c <= length; ++s) out.push_back({s, c});
  }
  return out;
}

std::array<size_t, 3> split_counts(size_t n, const SplitFractions& fractions) {
  // The epsilon keeps products such as 0.06 * 3200 from flooring one short.
  const auto floor_count = [n](double f) {
    return static_cast<size_t>(std::floor(f * static_cast<double>(n) + 1e-9));
  };
  const size_t n_train = std::min(n, floor_count(fractions[0]));
  const size_t n_test = std::min(n - n_train, floor_count(fractions[1]));
  return {n_train, n_test, n - n_train - n_test};
}

DatasetManifest shuffle_split(const std::vector<ChunkSpan>& chunks, const std::string& source,
                              uint64_t seed, const SplitFractions& fractions,
                              uint32_t sample_rate, double chunk_seconds) {
  if (chunks.empty()) throw Error(ErrorCode::kInvalidArgument, "no chunks to split");
  validate_fractions(fractions);

  std::vector<ChunkSpan> order = chunks;
  Rng rng(seed);
  for (size_t i = order.size() - 1; i >= 1; --i) {
    const size_t j = rng.below(i + 1);
    std::swap(order[i], order[j]);
  }

  const auto counts = split_counts(order.size(), fractions);
  DatasetManifest manifest;
  manifest.seed = seed;
  manifest.sample_rate = sample_rate;
  manifest.chunk_seconds = chunk_seconds;
  manifest.fractions = fractions;
  manifest.records.reserve(order.size());
  for (size_t i = 0; i < order.size(); ++i) {
    const Split split = i < counts[0]               ? Split::kTrain
                        : i < counts[0] + counts[1] ? Split::kTest
                                                    : Split::kValid;
    manifest.records.push_back({source, order[i].start, order[i].length, split});
  }
  return manifest;
}

std::string format_manifest(const DatasetManifest& m) {
  std::ostringstream out;
  out << "seed=" << m.seed << " sample_rate=" << m.sample_rate
      << " chunk_seconds=" << format_double(m.chunk_seconds) << " fractions="
      << format_double(m.fractions[0]) << ',' << format_double(m.fractions[1]) << ','
      << format_double(m.fractions[2]) << '\n';
  for (const auto& r : m.records) {
    out << r.source << '\t' << r.start << '\t' << r.length << '\t' << split_name(r.split) << '\n';
  }
  return out.str();
}

DatasetManifest parse_manifest(const std::string& text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) manifest_error(1, "missing header");

  DatasetManifest m;
  {
    const auto fields = split(lines[0], ' ');
    const char* keys[] = {"seed=", "sample_rate=", "chunk_seconds=", "fractions="};
    if (fields.size() != 4) manifest_error(1, "header must have 4 fields");
    for (size_t i = 0; i < 4; ++i) {
      if (!fields[i].starts_with(keys[i])) {
        manifest_error(1, std::string("expected field '") + keys[i] + "'");
      }
    }
    const auto value = [&](size_t i) { return fields[i].substr(std::strlen(keys[i])); };
    const auto seed = parse_u64(value(0));
    const auto rate = parse_u64(value(1));
    const auto secs = parse_double(value(2));
    if (!seed) manifest_error(1, "bad seed");
    if (!rate || *rate == 0 || *rate > UINT32_MAX) manifest_error(1, "bad sample_rate");
    if (!secs || !(*secs > 0.0)) manifest_error(1, "bad chunk_seconds");
    const auto fr = split(value(3), ',');
    if (fr.size() != 3) manifest_error(1, "fractions needs 3 values");
    for (size_t i = 0; i < 3; ++i) {
      const auto f = parse_double(fr[i]);
      if (!f) manifest_error(1, "bad fraction");
      m.fractions[i] = *f;
    }
    m.seed = *seed;
    m.sample_rate = static_cast<uint32_t>(*rate);
    m.chunk_seconds = *secs;
  }

  for (size_t i = 1; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto fields = split(line, '\t');
    if (fields.size() != 4) manifest_error(line_no, "expected 4 tab-separated fields");
    if (fields[0].empty()) manifest_error(line_no, "empty source");
    const auto start = parse_u64(fields[1]);
    const auto length = parse_u64(fields[2]);
    if (!start) manifest_error(line_no, "bad start");
    if (!length || *length == 0) manifest_error(line_no, "bad length");
    ChunkRecord r;
    r.source = std::string(fields[0]);
    r.start = *start;
    r.length = *length;
    try {
      r.split = parse_split(std::string(fields[3]));
    } catch (const Error& e) {
      manifest_error(line_no, e.what());
    }
    if (!m.records.empty() && r.length != m.records.front().length) {
      manifest_error(line_no, "chunk length differs from first record");
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  write_file_atomic(path, format_manifest(manifest));
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path));
}

}  // namespace srnn
