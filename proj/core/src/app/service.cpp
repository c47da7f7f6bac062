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

#include "uae/app/service.hpp"

#include <chrono>

#include "json.hpp"

namespace uae::app {

using nlohmann::json;

RetrievalService::RetrievalService(retriever::BiEncoder encoder, data::Tokenizer tokenizer,
                                   index::Index index)
    : encoder_(std::move(encoder)), tokenizer_(std::move(tokenizer)), index_(std::move(index)) {
  if (encoder_.dim() != index_.vectors.dim()) {
    throw FormatError("encoder dimension " + std::to_string(encoder_.dim()) +
                      " does not match index dimension " +
                      std::to_string(index_.vectors.dim()));
  }
}

RetrievalService RetrievalService::load(const std::filesystem::path& encoder_path,
                                        const std::filesystem::path& index_path) {
  if (!std::filesystem::exists(encoder_path)) throw MissingInputError(encoder_path.string());
  if (!std::filesystem::exists(index_path)) throw MissingInputError(index_path.string());
  auto loaded = retriever::BiEncoder::load(encoder_path);
  if (!loaded.tokenizer) {
    throw FormatError(encoder_path.string() + " has no vocabulary section");
  }
  return RetrievalService(std::move(loaded.encoder), std::move(*loaded.tokenizer),
                          index::Index::load(index_path));
}

RetrievalService::Response RetrievalService::retrieve(std::string_view question,
                                                      std::size_t k) const {
  if (k < 1) throw ValidationError("k must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const auto tokens = tokenizer_.tokenize(question);
  if (tokens.empty()) throw ValidationError("question has no tokens");
  const auto q = encoder_.encode(tokens);
  Response r;
  r.results = index_.search(q, std::min(k, size()));
  r.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

namespace {

HttpReply error_reply(int status, const std::string& message) {
  return {status, "application/json", json{{"error", message}}.dump()};
}

}  // namespace

HttpReply RetrievalService::handle_retrieve(std::string_view body, std::size_t default_k) const {
  std::string question;
  std::size_t k = default_k;
  try {
    const auto j = json::parse(body);
    if (!j.is_object()) return error_reply(400, "body must be a JSON object");
    if (!j.contains("question") || !j.at("question").is_string()) {
      return error_reply(400, "\"question\" must be a string");
    }
    question = j.at("question").get<std::string>();
    if (j.contains("k")) {
      const auto& kj = j.at("k");
      if (!kj.is_number_integer()) return error_reply(400, "\"k\" must be an integer");
      if (kj.get<long long>() < 1) return error_reply(400, "\"k\" must be >= 1");
      k = static_cast<std::size_t>(kj.get<long long>());
    }
  } catch (const json::exception& e) {
    return error_reply(400, std::string("malformed JSON body: ") + e.what());
  }
  try {
    const auto r = retrieve(question, k);
    json out;
    out["results"] = json::array();
    for (const auto& d : r.results) out["results"].push_back({{"doc_id", d.doc_id}, {"score", d.score}});
    out["latency_ms"] = r.latency_ms;
    return {200, "application/json", out.dump()};
  } catch (const ValidationError& e) {
    return error_reply(400, e.what());
  } catch (const std::exception& e) {
    return error_reply(500, e.what());
  }
}

HttpReply RetrievalService::handle_healthz() const { return {200, "text/plain", "ok"}; }

}  // namespace uae::app
