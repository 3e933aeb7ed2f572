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

#include "core/titlegen.hpp"

#include <set>

#include "core/error.hpp"
#include "core/util.hpp"

namespace srnn {

std::vector<std::string> tokenize_title(std::string_view line) {
  std::vector<std::string> tokens;
  size_t i = 0;
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
  };
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.emplace_back(line.substr(start, i - start));
  }
  return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

TitleCorpus::TitleCorpus(std::vector<std::vector<std::string>> titles)
    : titles_(std::move(titles)) {
  for (const auto& t : titles_) {
    if (t.empty()) throw Error(ErrorCode::kInvalidArgument, "title corpus has an empty title");
  }
}

TitleCorpus TitleCorpus::parse(std::string_view text) {
  std::vector<std::vector<std::string>> titles;
  for (std::string_view line : split(text, '\n')) {
    auto tokens = tokenize_title(line);
    if (!tokens.empty()) titles.push_back(std::move(tokens));
  }
  return TitleCorpus(std::move(titles));
}

TitleCorpus TitleCorpus::load(const std::filesystem::path& path) {
  return parse(read_text_file(path));
}

bool TitleCorpus::contains(const std::string& joined_title) const {
  for (const auto& t : titles_) {
    if (join_tokens(t) == joined_title) return true;
  }
  return false;
}

uint64_t MarkovModel::total_transitions() const {
  uint64_t total = 0;
  for (const auto& [state, next] : table_) {
    for (const auto& [id, n] : next) total += n;
  }
  return total;
}

int MarkovModel::token_id(const std::string& word) const {
  const auto it = ids_.find(word);
  return it == ids_.end() ? -1 : it->second;
}

uint64_t MarkovModel::count(const State& state, int next) const {
  const auto it = table_.find(state);
  if (it == table_.end()) return 0;
  const auto jt = it->second.find(next);
  return jt == it->second.end() ? 0 : jt->second;
}

MarkovModel build_markov(const TitleCorpus& corpus, int order) {
  if (order != 2 && order != 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "markov order must be 2 or 3, got " + std::to_string(order));
  }
  if (corpus.size() == 0) throw Error(ErrorCode::kInvalidArgument, "title corpus is empty");
  MarkovModel model;
  model.order_ = order;
  model.vocab_ = {"<s>", "</s>"};
  for (const auto& title : corpus.titles()) {
    std::vector<int> seq(order, MarkovModel::kBos);
    for (const auto& word : title) {
      auto [it, inserted] = model.ids_.emplace(word, static_cast<int>(model.vocab_.size()));
      if (inserted) model.vocab_.push_back(word);
      seq.push_back(it->second);
    }
    seq.push_back(MarkovModel::kEos);
    for (size_t i = 0; i + order < seq.size(); ++i) {
      MarkovModel::State state(seq.begin() + i, seq.begin() + i + order);
      ++model.table_[state][seq[i + order]];
    }
  }
  return model;
}

std::string generate_title(const MarkovModel& model, Rng& rng, size_t max_tokens) {
  MarkovModel::State state(model.order(), MarkovModel::kBos);
  std::vector<std::string> words;
  std::vector<int> ids;
  std::vector<double> weights;
  while (words.size() < max_tokens) {
    const auto it = model.transitions().find(state);
    // Every reachable state was observed, so this only guards a corrupted table.
    if (it == model.transitions().end()) break;
    ids.clear();
    weights.clear();
    for (const auto& [id, n] : it->second) {
      ids.push_back(id);
      weights.push_back(static_cast<double>(n));
    }
    const int next = ids[sample_categorical(weights, rng.uniform01())];
    if (next == MarkovModel::kEos) break;
    words.push_back(model.vocabulary()[next]);
    state.erase(state.begin());
    state.push_back(next);
  }
  return join_tokens(words);
}

TitleBatch generate_titles(const MarkovModel& model, size_t n, bool dedupe,
                           const TitleCorpus& corpus, Rng& rng, size_t max_tokens) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "title count must be >= 1");
  TitleBatch batch;
  if (!dedupe) {
    for (size_t i = 0; i < n; ++i) batch.titles.push_back(generate_title(model, rng, max_tokens));
    return batch;
  }
  std::set<std::string> seen;
  for (const auto& t : corpus.titles()) seen.insert(join_tokens(t));
  const size_t budget = 10 * n;
  for (size_t draw = 0; draw < budget && batch.titles.size() < n; ++draw) {
    std::string title = generate_title(model, rng, max_tokens);
    if (seen.insert(title).second) batch.titles.push_back(std::move(title));
  }
  batch.warnings = n - batch.titles.size();
  return batch;
}

bool is_markov_valid(const MarkovModel& model, const std::string& title, size_t max_tokens) {
  const auto words = tokenize_title(title);
  if (words.size() > max_tokens) return false;
  MarkovModel::State state(model.order(), MarkovModel::kBos);
  for (const auto& w : words) {
    const int id = model.token_id(w);
    if (id < 0 || model.count(state, id) == 0) return false;
    state.erase(state.begin());
    state.push_back(id);
  }
  if (words.size() == max_tokens) return true;
  return model.count(state, MarkovModel::kEos) > 0;
}

}  // namespace srnn
