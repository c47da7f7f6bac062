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

#include "uae/miner/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uae::miner {

Bm25Index Bm25Index::build(std::span<const data::Document> docs, Bm25Params params) {
  if (docs.empty()) throw ValidationError("cannot build a BM25 index over an empty corpus");
  if (!(params.k1 >= 0.0) || !(params.b >= 0.0 && params.b <= 1.0)) {
    throw ConfigError("BM25 needs k1 >= 0 and b in [0, 1]");
  }
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return docs[a].doc_id < docs[b].doc_id; });

  Bm25Index idx;
  idx.params_ = params;
  TokenId max_tok = 0;
  for (const auto& d : docs) {
    for (auto t : d.tokens) max_tok = std::max(max_tok, t);
  }
  idx.postings_.resize(static_cast<std::size_t>(max_tok) + 1);
  double total = 0.0;
  std::vector<std::uint32_t> counts(idx.postings_.size(), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& d = docs[order[pos]];
    if (pos > 0 && d.doc_id == idx.doc_ids_.back()) {
      throw ValidationError("duplicate doc_id in BM25 index: " + d.doc_id);
    }
    idx.doc_ids_.push_back(d.doc_id);
    idx.doc_len_.push_back(static_cast<double>(d.tokens.size()));
    total += static_cast<double>(d.tokens.size());
    for (auto t : d.tokens) ++counts[t];
    for (auto t : d.tokens) {
      if (counts[t] == 0) continue;
      idx.postings_[t].push_back({static_cast<std::uint32_t>(pos), counts[t]});
      counts[t] = 0;
    }
  }
  idx.avgdl_ = total / static_cast<double>(docs.size());
  return idx;
}

double Bm25Index::idf(TokenId t) const {
  const double n = static_cast<double>(doc_ids_.size());
  const double df = t < postings_.size() ? static_cast<double>(postings_[t].size()) : 0.0;
  return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

std::span<const Posting> Bm25Index::postings(TokenId t) const {
  if (t >= postings_.size()) return {};
  return postings_[t];
}

std::vector<std::uint32_t> Bm25Index::unique_terms(std::span<const TokenId> query) const {
  std::vector<std::uint32_t> terms;
  for (auto t : query) {
    if (t < postings_.size() && !postings_[t].empty()) terms.push_back(t);
  }
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  return terms;
}

std::vector<double> Bm25Index::score_all(std::span<const TokenId> query) const {
  std::vector<double> scores(doc_ids_.size(), 0.0);
  const double k1 = params_.k1, b = params_.b;
  for (auto t : unique_terms(query)) {
    const double w = idf(t);
    for (const auto& p : postings_[t]) {
      const double tf = static_cast<double>(p.tf);
      const double norm = k1 * (1.0 - b + b * doc_len_[p.doc] / avgdl_);
      scores[p.doc] += w * tf * (k1 + 1.0) / (tf + norm);
    }
  }
  return scores;
}

double Bm25Index::score(std::span<const TokenId> query, std::string_view doc_id) const {
  auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), doc_id);
  if (it == doc_ids_.end() || *it != doc_id) {
    throw ReferentialError("document not in BM25 index", std::string(doc_id));
  }
  const auto pos = static_cast<std::uint32_t>(it - doc_ids_.begin());
  const double k1 = params_.k1, b = params_.b;
  double s = 0.0;
  for (auto t : unique_terms(query)) {
    const auto& list = postings_[t];
    auto p = std::lower_bound(list.begin(), list.end(), pos,
                              [](const Posting& x, std::uint32_t d) { return x.doc < d; });
    if (p == list.end() || p->doc != pos) continue;
    const double tf = static_cast<double>(p->tf);
    s += idf(t) * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * doc_len_[pos] / avgdl_));
  }
  return s;
}

std::vector<ScoredDoc> Bm25Index::topk(std::span<const TokenId> query, std::size_t k,
                                       const std::set<std::string>& exclude) const {
  if (k == 0) return {};
  const auto scores = score_all(query);
  std::vector<ScoredDoc> hits;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > 0.0 && !exclude.contains(doc_ids_[i])) hits.push_back({doc_ids_[i], scores[i]});
  }
  top_k(hits, k);
  return hits;
}

std::vector<ScoredDoc> bm25_topk(const Bm25Index& index, std::span<const TokenId> q,
                                 std::size_t k, const std::set<std::string>& exclude) {
  return index.topk(q, k, exclude);
}

}  // namespace uae::miner
