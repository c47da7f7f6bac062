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

#include "uae/data/dataset.hpp"

#include <fstream>
#include <functional>
#include <initializer_list>
#include <unordered_set>

#include "json.hpp"

namespace uae::data {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Calls `fn(object, line_number)` for each line of `in`, after checking that
// the line is a JSON object with exactly the `fields` keys.
void for_each_record(std::istream& in, std::initializer_list<std::string_view> fields,
                     const std::function<void(const json&, std::size_t)>& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw IngestError("empty line", lineno);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw IngestError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    if (!obj.is_object()) throw IngestError("record is not a JSON object", lineno);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (auto f : fields) known = known || it.key() == f;
      if (!known) throw IngestError("unknown field \"" + it.key() + "\"", lineno);
    }
    for (auto f : fields) {
      if (!obj.contains(f)) {
        throw IngestError("missing field \"" + std::string(f) + "\"", lineno);
      }
    }
    fn(obj, lineno);
  }
}

std::string get_string(const json& obj, const char* key, std::size_t line) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw IngestError(std::string("field \"") + key + "\" must be a string", line);
  return v.get<std::string>();
}

std::vector<std::string> get_strings(const json& obj, const char* key, std::size_t line) {
  const auto& v = obj.at(key);
  if (!v.is_array()) throw IngestError(std::string("field \"") + key + "\" must be an array", line);
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_string()) {
      throw IngestError(std::string("field \"") + key + "\" must contain strings", line);
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw MissingInputError(p.string());
  return in;
}

template <typename F>
auto with_file(const std::filesystem::path& p, F&& parse) {
  auto in = open_input(p);
  try {
    return parse(in);
  } catch (const ReferentialError&) {
    throw;
  } catch (const IngestError& e) {
    throw IngestError(p.filename().string() + ": " + e.what());
  }
}

void write_lines(const std::filesystem::path& p, const std::vector<ordered_json>& rows) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + p.string());
  for (const auto& r : rows) out << r.dump() << '\n';
}

}  // namespace

std::vector<DocumentRecord> parse_corpus(std::istream& in) {
  std::vector<DocumentRecord> out;
  for_each_record(in, {"doc_id", "text"}, [&](const json& o, std::size_t line) {
    out.push_back({get_string(o, "doc_id", line), get_string(o, "text", line)});
  });
  return out;
}

std::vector<QueryRecord> parse_queries(std::istream& in) {
  std::vector<QueryRecord> out;
  for_each_record(in, {"query_id", "question", "answers", "gold_doc_ids"},
                  [&](const json& o, std::size_t line) {
                    out.push_back({get_string(o, "query_id", line),
                                   get_string(o, "question", line),
                                   get_strings(o, "answers", line),
                                   get_strings(o, "gold_doc_ids", line)});
                  });
  return out;
}

std::vector<CandidatePool> parse_pools(std::istream& in) {
  std::vector<CandidatePool> out;
  for_each_record(in, {"query_id", "doc_ids"}, [&](const json& o, std::size_t line) {
    out.push_back({get_string(o, "query_id", line), get_strings(o, "doc_ids", line)});
  });
  return out;
}

Dataset Dataset::build(std::vector<DocumentRecord> docs, std::vector<QueryRecord> queries,
                       std::vector<CandidatePool> pools, const LoadOptions& opts) {
  if (docs.empty()) throw IngestError("corpus is empty");
  if (opts.pool_size < 1) throw ConfigError("pool size must be >= 1");

  Dataset ds;
  ds.pool_size_ = opts.pool_size;

  std::vector<std::string> texts;
  texts.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto line = i + 1;
    if (docs[i].doc_id.empty()) throw IngestError("empty doc_id", line);
    if (!ds.doc_by_id_.emplace(docs[i].doc_id, i).second) {
      throw IngestError("duplicate doc_id \"" + docs[i].doc_id + "\"", line);
    }
    if (normalize(docs[i].text).empty()) {
      throw IngestError("document \"" + docs[i].doc_id + "\" has no tokens", line);
    }
    texts.push_back(docs[i].text);
  }
  ds.tokenizer_ = Tokenizer::build(texts, opts.min_freq);

  ds.docs_.reserve(docs.size());
  for (auto& d : docs) {
    auto toks = ds.tokenizer_.tokenize(d.text);
    ds.docs_.push_back({std::move(d.doc_id), std::move(d.text), std::move(toks)});
  }

  ds.queries_.reserve(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto line = i + 1;
    auto& q = queries[i];
    if (q.query_id.empty()) throw IngestError("empty query_id", line);
    if (!ds.query_by_id_.emplace(q.query_id, i).second) {
      throw IngestError("duplicate query_id \"" + q.query_id + "\"", line);
    }
    if (q.answers.empty()) throw IngestError("query \"" + q.query_id + "\" has no answers", line);
    if (q.gold_doc_ids.empty()) {
      throw IngestError("query \"" + q.query_id + "\" has no gold documents", line);
    }
    std::vector<TokenSeq> answer_tokens;
    for (const auto& a : q.answers) {
      if (normalize(a).empty()) {
        throw IngestError("query \"" + q.query_id + "\" has a blank answer", line);
      }
      answer_tokens.push_back(ds.tokenizer_.tokenize(a));
    }
    std::unordered_set<std::string> seen;
    for (const auto& g : q.gold_doc_ids) {
      if (!ds.doc_by_id_.contains(g)) {
        throw ReferentialError("query \"" + q.query_id + "\" references unknown doc_id \"" +
                                   g + "\"",
                               g, line);
      }
      if (!seen.insert(g).second) {
        throw IngestError("query \"" + q.query_id + "\" lists gold doc \"" + g + "\" twice",
                          line);
      }
    }
    auto qtoks = ds.tokenizer_.tokenize(q.question);
    ds.queries_.push_back({std::move(q.query_id), std::move(q.question), std::move(q.answers),
                           std::move(q.gold_doc_ids), std::move(qtoks),
                           std::move(answer_tokens)});
  }

  ds.pools_.reserve(pools.size());
  for (std::size_t i = 0; i < pools.size(); ++i) {
    const auto line = i + 1;
    auto& p = pools[i];
    auto qit = ds.query_by_id_.find(p.query_id);
    if (qit == ds.query_by_id_.end()) {
      throw ReferentialError("pool references unknown query_id \"" + p.query_id + "\"",
                             p.query_id, line);
    }
    if (!ds.pool_by_query_.emplace(p.query_id, i).second) {
      throw IngestError("duplicate pool for query \"" + p.query_id + "\"", line);
    }
    if (p.doc_ids.size() != opts.pool_size) {
      throw IngestError("pool for query \"" + p.query_id + "\" has " +
                            std::to_string(p.doc_ids.size()) + " documents, expected " +
                            std::to_string(opts.pool_size),
                        line);
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : p.doc_ids) {
      if (!ds.doc_by_id_.contains(id)) {
        throw ReferentialError("pool for query \"" + p.query_id +
                                   "\" references unknown doc_id \"" + id + "\"",
                               id, line);
      }
      if (!seen.insert(id).second) {
        throw IngestError("pool for query \"" + p.query_id + "\" repeats doc \"" + id + "\"",
                          line);
      }
    }
    if (opts.require_gold_in_pool) {
      const auto& q = ds.queries_[qit->second];
      bool has_gold = false;
      for (const auto& g : q.gold_doc_ids) has_gold = has_gold || seen.contains(g);
      if (!has_gold) {
        throw IngestError("pool for query \"" + p.query_id + "\" contains no gold document",
                          line);
      }
    }
    ds.pools_.push_back(std::move(p));
  }
  for (const auto& q : ds.queries_) {
    if (!ds.pool_by_query_.contains(q.query_id)) {
      throw IngestError("query \"" + q.query_id + "\" has no candidate pool");
    }
  }
  return ds;
}

Dataset Dataset::load(const std::filesystem::path& corpus_path,
                      const std::filesystem::path& queries_path,
                      const std::filesystem::path& pools_path, const LoadOptions& opts) {
  auto docs = with_file(corpus_path, [](std::istream& in) { return parse_corpus(in); });
  auto queries = with_file(queries_path, [](std::istream& in) { return parse_queries(in); });
  auto pools = with_file(pools_path, [](std::istream& in) { return parse_pools(in); });
  try {
    return build(std::move(docs), std::move(queries), std::move(pools), opts);
  } catch (const ReferentialError&) {
    throw;
  } catch (const IngestError& e) {
    throw IngestError(std::string("dataset: ") + e.what());
  }
}

Dataset Dataset::load_corpus(const std::filesystem::path& corpus_path, std::size_t min_freq) {
  auto docs = with_file(corpus_path, [](std::istream& in) { return parse_corpus(in); });
  LoadOptions opts;
  opts.min_freq = min_freq;
  return build(std::move(docs), {}, {}, opts);
}

void Dataset::write(const std::filesystem::path& corpus_path,
                    const std::filesystem::path& queries_path,
                    const std::filesystem::path& pools_path) const {
  std::vector<ordered_json> rows;
  for (const auto& d : docs_) rows.push_back({{"doc_id", d.doc_id}, {"text", d.text}});
  write_lines(corpus_path, rows);
  rows.clear();
  for (const auto& q : queries_) {
    rows.push_back({{"query_id", q.query_id},
                    {"question", q.question},
                    {"answers", q.answers},
                    {"gold_doc_ids", q.gold_doc_ids}});
  }
  write_lines(queries_path, rows);
  rows.clear();
  for (const auto& p : pools_) rows.push_back({{"query_id", p.query_id}, {"doc_ids", p.doc_ids}});
  write_lines(pools_path, rows);
}

std::size_t Dataset::doc_index(std::string_view doc_id) const {
  auto it = doc_by_id_.find(std::string(doc_id));
  if (it == doc_by_id_.end()) {
    throw ReferentialError("unknown doc_id \"" + std::string(doc_id) + "\"",
                           std::string(doc_id));
  }
  return it->second;
}

bool Dataset::has_doc(std::string_view doc_id) const {
  return doc_by_id_.contains(std::string(doc_id));
}

const QaExample& Dataset::query(std::string_view query_id) const {
  auto it = query_by_id_.find(std::string(query_id));
  if (it == query_by_id_.end()) {
    throw ReferentialError("unknown query_id \"" + std::string(query_id) + "\"",
                           std::string(query_id));
  }
  return queries_[it->second];
}

const CandidatePool& Dataset::pool(std::string_view query_id) const {
  auto it = pool_by_query_.find(std::string(query_id));
  if (it == pool_by_query_.end()) {
    throw ReferentialError("no pool for query_id \"" + std::string(query_id) + "\"",
                           std::string(query_id));
  }
  return pools_[it->second];
}

}  // namespace uae::data
