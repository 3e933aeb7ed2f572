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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "core/rng.hpp"

namespace srnn {

// One title per entry, each a nonempty list of whitespace-separated tokens.
class TitleCorpus {
 public:
  explicit TitleCorpus(std::vector<std::vector<std::string>> titles);

  // One title per line; blank lines are skipped.
  static TitleCorpus parse(std::string_view text);
  static TitleCorpus load(const std::filesystem::path& path);

  const std::vector<std::vector<std::string>>& titles() const { return titles_; }
  size_t size() const { return titles_.size(); }
  bool contains(const std::string& joined_title) const;

 private:
  std::vector<std::vector<std::string>> titles_;
};

std::vector<std::string> tokenize_title(std::string_view line);
std::string join_tokens(const std::vector<std::string>& tokens);

// Word-level Markov chain. Token id 0 is the BOS pad, 1 is EOS and words get
// ids from 2 in order of first appearance.
class MarkovModel {
 public:
  static constexpr int kBos = 0;
  static constexpr int kEos = 1;

  using State = std::vector<int>;
  using Successors = std::map<int, uint64_t>;

  int order() const { return order_; }
  const std::map<State, Successors>& transitions() const { return table_; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  uint64_t total_transitions() const;

  // Token id of a word, -1 if unseen.
  int token_id(const std::string& word) const;

  // Count of `next` after `state`, 0 if never observed.
  uint64_t count(const State& state, int next) const;

 private:
  friend MarkovModel build_markov(const TitleCorpus& corpus, int order);

  int order_ = 2;
  std::vector<std::string> vocab_;  // indexed by token id
  std::map<std::string, int> ids_;
  std::map<State, Successors> table_;
};

// Pads every title with `order` BOS tokens and one EOS token and counts every
// length-(order+1) window. Throws kInvalidArgument for an empty corpus or an
// order other than 2 or 3.
MarkovModel build_markov(const TitleCorpus& corpus, int order);

std::string generate_title(const MarkovModel& model, Rng& rng, size_t max_tokens = 12);

struct TitleBatch {
  std::vector<std::string> titles;
  size_t warnings = 0;  // titles requested but not produced
};

// With dedupe, titles already in the corpus are rejected and outputs are
// made unique, within a budget of 10 * n draws.
TitleBatch generate_titles(const MarkovModel& model, size_t n, bool dedupe,
                           const TitleCorpus& corpus, Rng& rng, size_t max_tokens = 12);

// True when every (state, successor) step of the title exists in the table.
// A title cut off by max_tokens is checked without its terminating EOS.
bool is_markov_valid(const MarkovModel& model, const std::string& title,
                     size_t max_tokens = 12);

}  // namespace srnn
