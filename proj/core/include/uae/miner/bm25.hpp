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
#include <set>
#include <span>
#include <string>
#include <vector>

#include "uae/common.hpp"
#include "uae/data/dataset.hpp"
#include "uae/ranking.hpp"

namespace uae::miner {

struct Posting {
  std::uint32_t doc = 0;  // position in doc_ids(), which is sorted by doc_id
  std::uint32_t tf = 0;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Okapi BM25 over token ids with idf = ln((N - df + 0.5) / (df + 0.5) + 1).
/// Repeated query terms count once. Immutable after build.
class Bm25Index {
 public:
  Bm25Index() = default;
  static Bm25Index build(std::span<const data::Document> docs, Bm25Params params = {});

  /// Score of every indexed document, aligned with doc_ids().
  std::vector<double> score_all(std::span<const TokenId> query) const;
  double score(std::span<const TokenId> query, std::string_view doc_id) const;

  /// Documents with a positive score, best first, ties by ascending doc_id.
  std::vector<ScoredDoc> topk(std::span<const TokenId> query, std::size_t k,
                              const std::set<std::string>& exclude = {}) const;

  double idf(TokenId t) const;
  std::span<const Posting> postings(TokenId t) const;
  std::span<const std::string> doc_ids() const { return doc_ids_; }
  std::size_t size() const { return doc_ids_.size(); }
  double avg_doc_len() const { return avgdl_; }
  const Bm25Params& params() const { return params_; }

 private:
  std::vector<std::uint32_t> unique_terms(std::span<const TokenId> query) const;

  Bm25Params params_;
  std::vector<std::string> doc_ids_;
  std::vector<double> doc_len_;
  double avgdl_ = 0.0;
  std::vector<std::vector<Posting>> postings_;  // indexed by token id
};

/// Free-function form of Bm25Index::topk.
std::vector<ScoredDoc> bm25_topk(const Bm25Index& index, std::span<const TokenId> q,
                                 std::size_t k, const std::set<std::string>& exclude = {});

}  // namespace uae::miner
