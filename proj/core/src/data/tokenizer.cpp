// Copyright 2026 The UAE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uae/data/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <map>

namespace uae::data {
namespace {

constexpr std::array<std::string_view, kNumReserved> kReserved = {
    "<pad>", "<unk>", "<sep>", "<bos>", "<eos>"};

bool is_ascii_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) ||
         (c >= 0x5b && c <= 0x60) || (c >= 0x7b && c <= 0x7e);
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

std::vector<std::string> normalize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_space(c) || is_ascii_punct(c) || c < 0x20 || c == 0x7f) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    cur.push_back(static_cast<char>(c));
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Tokenizer Tokenizer::build(std::span<const std::string> texts, std::size_t min_freq) {
  if (texts.empty()) throw IngestError("cannot build a vocabulary from an empty corpus");
  if (min_freq < 1) throw ConfigError("min_freq must be >= 1");

  std::map<std::string, std::size_t> counts;  // sorted, so ids come out in order
  for (const auto& text : texts) {
    for (auto& tok : normalize(text)) ++counts[std::move(tok)];
  }
  Tokenizer tok;
  tok.id_to_token_.assign(kReserved.begin(), kReserved.end());
  for (const auto& [word, n] : counts) {
    if (n >= min_freq) tok.id_to_token_.push_back(word);
  }
  tok.index();
  return tok;
}

Tokenizer Tokenizer::from_vocab(std::vector<std::string> id_to_token) {
  if (id_to_token.size() < kNumReserved) throw FormatError("vocabulary too small");
  for (std::size_t i = 0; i < kNumReserved; ++i) {
    if (id_to_token[i] != kReserved[i]) throw FormatError("reserved tokens out of place");
  }
  Tokenizer tok;
  tok.id_to_token_ = std::move(id_to_token);
  tok.index();
  if (tok.token_to_id_.size() != tok.id_to_token_.size()) {
    throw FormatError("duplicate token in vocabulary");
  }
  return tok;
}

void Tokenizer::index() {
  token_to_id_.clear();
  token_to_id_.reserve(id_to_token_.size());
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    token_to_id_.emplace(id_to_token_[i], static_cast<TokenId>(i));
  }
}

TokenSeq Tokenizer::tokenize(std::string_view text) const {
  TokenSeq ids;
  for (const auto& t : normalize(text)) ids.push_back(id(t));
  return ids;
}

std::string Tokenizer::detokenize(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId i : ids) {
    if (!out.empty()) out.push_back(' ');
    out += i < id_to_token_.size() ? id_to_token_[i] : id_to_token_[kUnk];
  }
  return out;
}

TokenId Tokenizer::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

bool Tokenizer::contains(std::string_view token) const {
  return token_to_id_.contains(std::string(token));
}

}  // namespace uae::data
