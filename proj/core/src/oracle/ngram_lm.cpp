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

#include "uae/oracle/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uae/data/tokenizer.hpp"

namespace uae::oracle {

NgramLm NgramLm::train(std::span<const TokenSeq> corpus, int order, double add_k,
                       std::size_t vocab_size) {
  if (order < 1 || order > 4) {
    throw ConfigError("n-gram order must be in [1, 4], got " + std::to_string(order));
  }
  if (!(add_k > 0.0) || !std::isfinite(add_k)) throw ConfigError("add_k must be > 0");
  if (corpus.empty()) throw ConfigError("cannot train a language model on an empty corpus");
  if (vocab_size == 0) throw ConfigError("vocab_size must be > 0");

  NgramLm lm;
  lm.order_ = order;
  lm.add_k_ = add_k;
  lm.vocab_size_ = vocab_size;

  const std::size_t ctx_len = static_cast<std::size_t>(order - 1);
  NgramContext ctx(ctx_len);
  for (const auto& seq : corpus) {
    std::fill(ctx.begin(), ctx.end(), data::kBos);
    for (TokenId tok : seq) {
      if (tok >= vocab_size) throw ConfigError("token id outside vocabulary");
      auto& cc = lm.counts_[ctx];
      ++cc.total;
      ++cc.next[tok];
      if (ctx_len > 0) {
        std::rotate(ctx.begin(), ctx.begin() + 1, ctx.end());
        ctx.back() = tok;
      }
    }
  }
  return lm;
}

NgramContext NgramLm::context_of(std::span<const TokenId> history) const {
  const std::size_t ctx_len = static_cast<std::size_t>(order_ - 1);
  NgramContext ctx(ctx_len, data::kBos);
  const std::size_t take = std::min(ctx_len, history.size());
  std::copy(history.end() - static_cast<std::ptrdiff_t>(take), history.end(),
            ctx.end() - static_cast<std::ptrdiff_t>(take));
  return ctx;
}

const ContextCounts* NgramLm::find(std::span<const TokenId> history) const {
  auto it = counts_.find(context_of(history));
  return it == counts_.end() ? nullptr : &it->second;
}

double NgramLm::prob(const ContextCounts* ctx, TokenId x) const {
  const double denom_smooth = add_k_ * static_cast<double>(vocab_size_);
  if (ctx == nullptr) return add_k_ / denom_smooth;
  auto it = ctx->next.find(x);
  const double c = it == ctx->next.end() ? 0.0 : static_cast<double>(it->second);
  return (c + add_k_) / (static_cast<double>(ctx->total) + denom_smooth);
}

double NgramLm::prob(std::span<const TokenId> history, TokenId x) const {
  return prob(find(history), x);
}

}  // namespace uae::oracle
