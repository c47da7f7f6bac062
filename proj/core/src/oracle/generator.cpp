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

#include "uae/oracle/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "uae/data/tokenizer.hpp"

namespace uae::oracle {
namespace {

bool is_content(TokenId t) { return t >= data::kNumReserved; }

}  // namespace

Generator::Generator(NgramLm lm, double copy_weight, double copy_context_weight)
    : lm_(std::move(lm)),
      copy_weight_(copy_weight),
      copy_context_weight_(copy_context_weight) {
  if (!(copy_weight >= 0.0 && copy_weight < 1.0)) {
    throw ConfigError("copy_weight must be in [0, 1)");
  }
  if (!(copy_context_weight >= 0.0 && copy_context_weight <= 1.0)) {
    throw ConfigError("copy_context_weight must be in [0, 1]");
  }
}

Generator Generator::train(std::span<const TokenSeq> corpus, std::size_t vocab_size,
                           const OracleConfig& cfg) {
  return Generator(NgramLm::train(corpus, cfg.order, cfg.add_k, vocab_size), cfg.copy_weight,
                   cfg.copy_context_weight);
}

TokenSeq Generator::prompt(std::span<const TokenId> q, std::span<const TokenId> d) {
  TokenSeq h;
  h.reserve(q.size() + d.size() + 3);
  h.push_back(data::kBos);
  h.insert(h.end(), q.begin(), q.end());
  h.push_back(data::kSep);
  h.insert(h.end(), d.begin(), d.end());
  h.push_back(data::kSep);
  return h;
}

std::vector<std::pair<TokenId, double>> Generator::copy_distribution(
    std::span<const TokenId> history) const {
  // Tokens of the question segment (BOS q SEP) are not copied by the unigram
  // part: answers bring new information.
  // Tokens already emitted after the second SEP are not copied again.
  std::set<TokenId> asked, said;
  std::size_t body = 0;
  if (!history.empty() && history[0] == data::kBos) {
    auto sep = std::find(history.begin(), history.end(), data::kSep);
    if (sep != history.end()) {
      asked.insert(history.begin() + 1, sep);
      body = static_cast<std::size_t>(sep - history.begin()) + 1;
      auto sep2 = std::find(sep + 1, history.end(), data::kSep);
      if (sep2 != history.end()) said.insert(sep2 + 1, history.end());
    }
  }
  std::map<TokenId, double> unigram;
  std::size_t content = 0;
  for (std::size_t i = body; i < history.size(); ++i) {
    const TokenId t = history[i];
    if (is_content(t) && !asked.contains(t) && !said.contains(t)) {
      unigram[t] += 1.0;
      ++content;
    }
  }

  std::map<TokenId, double> succ;
  std::size_t matches = 0;
  const std::size_t n_ctx = static_cast<std::size_t>(lm_.order() - 1);
  const std::size_t len = history.size();
  if (n_ctx > 0 && len >= n_ctx) {
    auto ctx = history.subspan(len - n_ctx);
    if (std::all_of(ctx.begin(), ctx.end(), is_content)) {
      for (std::size_t i = n_ctx; i < len; ++i) {
        if (!is_content(history[i])) continue;
        if (said.contains(history[i])) continue;
        if (std::equal(ctx.begin(), ctx.end(), history.begin() + (i - n_ctx))) {
          succ[history[i]] += 1.0;
          ++matches;
        }
      }
    }
  }

  if (content == 0 && matches == 0) return {};
  double beta = matches > 0 ? copy_context_weight_ : 0.0;
  if (content == 0) beta = 1.0;
  std::map<TokenId, double> mix;
  for (const auto& [t, c] : unigram) mix[t] += (1.0 - beta) * c / static_cast<double>(content);
  for (const auto& [t, c] : succ) mix[t] += beta * c / static_cast<double>(matches);
  return {mix.begin(), mix.end()};
}

double Generator::next_prob(std::span<const TokenId> history, TokenId x) const {
  const double base = lm_.prob(history, x);
  auto copy = copy_distribution(history);
  if (copy.empty()) return base;
  double c = 0.0;
  for (const auto& [t, p] : copy) {
    if (t == x) c = p;
  }
  return (1.0 - copy_weight_) * base + copy_weight_ * c;
}

std::vector<double> Generator::next_distribution(std::span<const TokenId> history) const {
  const auto* ctx = lm_.find(history);
  std::vector<double> dist(lm_.vocab_size());
  for (std::size_t x = 0; x < dist.size(); ++x) dist[x] = lm_.prob(ctx, static_cast<TokenId>(x));
  auto copy = copy_distribution(history);
  if (!copy.empty()) {
    for (double& p : dist) p *= (1.0 - copy_weight_);
    for (const auto& [t, p] : copy) {
      if (t < dist.size()) dist[t] += copy_weight_ * p;
    }
  }
  return dist;
}

std::vector<double> Generator::answer_token_probs(std::span<const TokenId> q,
                                                  std::span<const TokenId> d,
                                                  std::span<const TokenId> a) const {
  TokenSeq h = prompt(q, d);
  std::vector<double> probs;
  probs.reserve(a.size());
  for (TokenId t : a) {
    probs.push_back(next_prob(h, t));
    h.push_back(t);
  }
  return probs;
}

double Generator::utility(std::span<const TokenId> q, std::span<const TokenId> d,
                          std::span<const TokenId> a) const {
  if (a.empty()) throw ValidationError("utility of an empty answer is undefined");
  auto probs = answer_token_probs(q, d, a);
  return utility_from_probs(probs);
}

double Generator::expected_utility(std::span<const TokenId> q, std::span<const TokenId> d,
                                   std::span<const TokenSeq> answers) const {
  if (answers.empty()) throw ValidationError("expected utility over an empty answer set");
  double sum = 0.0;
  for (const auto& a : answers) sum += utility(q, d, a);
  return sum / static_cast<double>(answers.size());
}

TokenSeq Generator::greedy_decode(std::span<const TokenId> q, std::span<const TokenId> d,
                                  std::size_t max_len) const {
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  TokenSeq h = prompt(q, d);
  TokenSeq out;
  while (out.size() < max_len) {
    const auto dist = next_distribution(h);
    TokenId best = data::kEos;
    double best_p = dist[data::kEos];
    for (TokenId x = data::kNumReserved; x < dist.size(); ++x) {
      if (dist[x] > best_p) {
        best = x;
        best_p = dist[x];
      }
    }
    if (best == data::kEos) break;
    out.push_back(best);
    h.push_back(best);
  }
  return out;
}

double utility_from_probs(std::span<const double> probs) {
  if (probs.empty()) throw ValidationError("utility of an empty answer is undefined");
  double sum = 0.0;
  for (double p : probs) sum += std::log(p);
  return std::exp(sum / static_cast<double>(probs.size()));
}

}  // namespace uae::oracle
