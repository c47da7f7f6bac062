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

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "uae/common.hpp"

namespace uae::oracle {

/// Fixed-length n-gram context, BOS-padded on the left.
using NgramContext = std::vector<TokenId>;

struct NgramContextHash {
  std::size_t operator()(const NgramContext& c) const noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (TokenId t : c) h = splitmix64(h ^ t);
    return static_cast<std::size_t>(h);
  }
};

struct ContextCounts {
  std::uint64_t total = 0;
  std::unordered_map<TokenId, std::uint64_t> next;

  friend bool operator==(const ContextCounts&, const ContextCounts&) = default;
};

/// Add-k smoothed n-gram language model:
///   p(x | ctx) = (count(ctx, x) + k) / (count(ctx) + k * |V|)
class NgramLm {
 public:
  using CountTable = std::unordered_map<NgramContext, ContextCounts, NgramContextHash>;

  /// Counts every order-length window of each sequence, with order-1 BOS
  /// tokens padded on the left. Sequences are not EOS-terminated here; add
  /// EOS explicitly where the model should learn to stop.
  static NgramLm train(std::span<const TokenSeq> corpus, int order, double add_k,
                       std::size_t vocab_size);

  /// Probability of `x` after `history`. Only the last order-1 tokens matter;
  /// shorter histories are BOS-padded.
  double prob(std::span<const TokenId> history, TokenId x) const;

  /// Looks up the counts for the context ending `history`, or nullptr.
  const ContextCounts* find(std::span<const TokenId> history) const;

  /// p(x | ctx) given a context's counts (nullptr = unseen context).
  double prob(const ContextCounts* ctx, TokenId x) const;

  int order() const { return order_; }
  double add_k() const { return add_k_; }
  std::size_t vocab_size() const { return vocab_size_; }
  const CountTable& counts() const { return counts_; }

  friend bool operator==(const NgramLm& a, const NgramLm& b) {
    return a.order_ == b.order_ && a.add_k_ == b.add_k_ && a.vocab_size_ == b.vocab_size_ &&
           a.counts_ == b.counts_;
  }

 private:
  NgramContext context_of(std::span<const TokenId> history) const;

  int order_ = 1;
  double add_k_ = 1.0;
  std::size_t vocab_size_ = 0;
  CountTable counts_;
};

}  // namespace uae::oracle
