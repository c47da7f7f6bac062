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

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "uae/common.hpp"
#include "uae/data/tokenizer.hpp"

namespace uae::data {

struct Document {
  std::string doc_id;
  std::string text;
  TokenSeq tokens;

  friend bool operator==(const Document&, const Document&) = default;
};

struct QaExample {
  std::string query_id;
  std::string question;
  std::vector<std::string> answers;
  std::vector<std::string> gold_doc_ids;
  TokenSeq question_tokens;  // may be empty
  std::vector<TokenSeq> answer_tokens;

  friend bool operator==(const QaExample&, const QaExample&) = default;
};

struct CandidatePool {
  std::string query_id;
  std::vector<std::string> doc_ids;

  friend bool operator==(const CandidatePool&, const CandidatePool&) = default;
};

struct LoadOptions {
  std::size_t pool_size = 50;
  std::size_t min_freq = 1;
  /// Every pool must contain at least one of its query's gold documents.
  bool require_gold_in_pool = true;
};

/// Raw records as they appear on disk, before linking and tokenization.
struct DocumentRecord {
  std::string doc_id;
  std::string text;
};
struct QueryRecord {
  std::string query_id;
  std::string question;
  std::vector<std::string> answers;
  std::vector<std::string> gold_doc_ids;
};

std::vector<DocumentRecord> parse_corpus(std::istream& in);
std::vector<QueryRecord> parse_queries(std::istream& in);
std::vector<CandidatePool> parse_pools(std::istream& in);

/// A fully validated and linked corpus + query set + candidate pools.
/// Immutable after construction.
class Dataset {
 public:
  static Dataset build(std::vector<DocumentRecord> docs, std::vector<QueryRecord> queries,
                       std::vector<CandidatePool> pools, const LoadOptions& opts = {});

  static Dataset load(const std::filesystem::path& corpus_path,
                      const std::filesystem::path& queries_path,
                      const std::filesystem::path& pools_path,
                      const LoadOptions& opts = {});

  /// Only the corpus; no queries or pools.
  static Dataset load_corpus(const std::filesystem::path& corpus_path,
                             std::size_t min_freq = 1);

  void write(const std::filesystem::path& corpus_path,
             const std::filesystem::path& queries_path,
             const std::filesystem::path& pools_path) const;

  const Tokenizer& tokenizer() const { return tokenizer_; }
  std::span<const Document> documents() const { return docs_; }
  std::span<const QaExample> queries() const { return queries_; }
  std::span<const CandidatePool> pools() const { return pools_; }

  std::size_t doc_index(std::string_view doc_id) const;
  const Document& doc(std::string_view doc_id) const { return docs_[doc_index(doc_id)]; }
  bool has_doc(std::string_view doc_id) const;

  const QaExample& query(std::string_view query_id) const;
  const CandidatePool& pool(std::string_view query_id) const;

  std::size_t pool_size() const { return pool_size_; }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.docs_ == b.docs_ && a.queries_ == b.queries_ && a.pools_ == b.pools_ &&
           a.tokenizer_ == b.tokenizer_;
  }

 private:
  std::vector<Document> docs_;
  std::vector<QaExample> queries_;
  std::vector<CandidatePool> pools_;
  Tokenizer tokenizer_;
  std::size_t pool_size_ = 0;
  std::unordered_map<std::string, std::size_t> doc_by_id_;
  std::unordered_map<std::string, std::size_t> query_by_id_;
  std::unordered_map<std::string, std::size_t> pool_by_query_;
};

}  // namespace uae::data
