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
#include <utility>
#include <vector>

#include "uae/common.hpp"
#include "uae/oracle/ngram_lm.hpp"

namespace uae::oracle {

struct OracleConfig {
  int order = 2;
  double add_k = 0.1;
  /// Mixture weight of the copy distribution estimated from the prompt.
  double copy_weight = 0.7;
  /// Within the copy distribution, weight of context-matched copying versus
  /// plain unigram copying.
  double copy_context_weight = 0.5;
};

/// Deterministic stand-in for a generator LLM.
///
/// Next-token probabilities mix the background n-gram model with a copy
/// (cache) distribution estimated on the prompt history:
///
///   p(x | h) = (1 - mu) * p_ngram(x | last n-1 tokens of h) + mu * p_copy(x | h)
///
/// p_copy puts mass only on content tokens (ids >= 5) that occur in h. Its
/// unigram part counts the tokens after the question segment (BOS q SEP) that
/// do not occur in the question. When the current context is made of content
/// tokens and occurs earlier in h, p_copy blends the empirical successor
/// distribution of that context with the unigram part; otherwise it is the
/// unigram part alone.
/// With mu = 0 this is exactly the n-gram model. Prompts are laid out as
/// BOS q SEP d SEP a.
class Generator {
 public:
  Generator(NgramLm lm, double copy_weight, double copy_context_weight);

  static Generator train(std::span<const TokenSeq> corpus, std::size_t vocab_size,
                         const OracleConfig& cfg);

  const NgramLm& lm() const { return lm_; }
  double copy_weight() const { return copy_weight_; }

  double next_prob(std::span<const TokenId> history, TokenId x) const;

  /// Full next-token distribution (dense, vocab_size entries).
  std::vector<double> next_distribution(std::span<const TokenId> history) const;

  /// Conditional probability of each answer token under the prompt (q, d).
  std::vector<double> answer_token_probs(std::span<const TokenId> q,
                                         std::span<const TokenId> d,
                                         std::span<const TokenId> a) const;

  /// exp(mean log p(a_t | a_<t, q, d)). Throws ValidationError on empty `a`.
  double utility(std::span<const TokenId> q, std::span<const TokenId> d,
                 std::span<const TokenId> a) const;

  /// Arithmetic mean of `utility` over the answer set.
  double expected_utility(std::span<const TokenId> q, std::span<const TokenId> d,
                          std::span<const TokenSeq> answers) const;

  /// Greedy (temperature 0) decoding. Each step emits the most probable of
  /// EOS and the content tokens, lowest id on ties; EOS is not returned.
  TokenSeq greedy_decode(std::span<const TokenId> q, std::span<const TokenId> d,
                         std::size_t max_len) const;

  static TokenSeq prompt(std::span<const TokenId> q, std::span<const TokenId> d);

 private:
  /// Sparse copy distribution over content tokens; empty when the history
  /// has no content tokens.
  std::vector<std::pair<TokenId, double>> copy_distribution(
      std::span<const TokenId> history) const;

  NgramLm lm_;
  double copy_weight_;
  double copy_context_weight_;
};

/// exp of the mean log of `probs`; the geometric mean.
double utility_from_probs(std::span<const double> probs);

}  // namespace uae::oracle
