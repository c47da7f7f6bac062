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
#include <string>
#include <string_view>
#include <vector>

#include "uae/data/tokenizer.hpp"
#include "uae/index/vector_index.hpp"
#include "uae/ranking.hpp"
#include "uae/retriever/bi_encoder.hpp"

namespace uae::app {

struct HttpReply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Online retrieval over immutable state: the encoder (with its vocabulary)
/// and the vector index. Nothing else is loaded. Safe for concurrent use.
class RetrievalService {
 public:
  RetrievalService(retriever::BiEncoder encoder, data::Tokenizer tokenizer, index::Index index);

  /// Throws MissingInputError for absent files and FormatError when the
  /// encoder carries no vocabulary or its dimension differs from the index.
  static RetrievalService load(const std::filesystem::path& encoder_path,
                               const std::filesystem::path& index_path);

  struct Response {
    std::vector<ScoredDoc> results;
    double latency_ms = 0.0;
  };

  /// Top-min(k, size) documents by inner product. ValidationError when k < 1
  /// or the question has no tokens.
  Response retrieve(std::string_view question, std::size_t k) const;

  std::size_t size() const { return index_.vectors.size(); }

  /// POST /retrieve with {"question": string, "k": int}; k defaults to
  /// `default_k`. 400 on a malformed body or k < 1, 500 otherwise.
  HttpReply handle_retrieve(std::string_view body, std::size_t default_k = 10) const;
  HttpReply handle_healthz() const;

 private:
  retriever::BiEncoder encoder_;
  data::Tokenizer tokenizer_;
  index::Index index_;
};

}  // namespace uae::app
