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

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "uae/common.hpp"

namespace uae::data {

inline constexpr TokenId kPad = 0;
inline constexpr TokenId kUnk = 1;
inline constexpr TokenId kSep = 2;
inline constexpr TokenId kBos = 3;
inline constexpr TokenId kEos = 4;
inline constexpr TokenId kNumReserved = 5;

/// Lowercases ASCII, turns ASCII punctuation into spaces and splits on
/// whitespace. Bytes >= 0x80 are kept verbatim. Idempotent.
std::vector<std::string> normalize(std::string_view text);

/// Word-level vocabulary with five reserved ids (PAD, UNK, SEP, BOS, EOS).
/// Immutable once built.
class Tokenizer {
 public:
  Tokenizer() = default;

  /// Counts normalized tokens over `texts` and assigns ids to every token
  /// with frequency >= min_freq, in lexicographic order, starting at 5.
  static Tokenizer build(std::span<const std::string> texts, std::size_t min_freq = 1);

  /// Rebuilds a tokenizer from its id-ordered token list, as stored in
  /// checkpoints. The first five entries must be the reserved tokens.
  static Tokenizer from_vocab(std::vector<std::string> id_to_token);

  TokenSeq tokenize(std::string_view text) const;
  std::string detokenize(std::span<const TokenId> ids) const;

  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const { return id_to_token_.at(id); }
  bool contains(std::string_view token) const;
  std::size_t size() const { return id_to_token_.size(); }
  std::span<const std::string> vocab() const { return id_to_token_; }

  friend bool operator==(const Tokenizer& a, const Tokenizer& b) {
    return a.id_to_token_ == b.id_to_token_;
  }

 private:
  void index();

  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

}  // namespace uae::data
