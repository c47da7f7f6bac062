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

#include "uae/oracle/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"
#include "uae/data/tokenizer.hpp"

namespace uae::oracle {

double apply_noise(double utility, const NoiseConfig& noise, std::string_view query_id,
                   std::string_view doc_id) {
  if (noise.sigma <= 0.0) return utility;
  std::uint64_t key = fnv1a64(query_id);
  key = fnv1a64("\x1f", key);
  key = fnv1a64(doc_id, key);
  std::mt19937_64 rng(splitmix64(noise.seed ^ key));
  std::normal_distribution<double> normal(0.0, 1.0);
  return std::min(1.0, utility * std::exp(noise.sigma * normal(rng)));
}

std::vector<UtilityRecord> score_pools(const Generator& gen, const data::Dataset& ds,
                                       const NoiseConfig& noise) {
  std::vector<const data::QaExample*> queries;
  for (const auto& q : ds.queries()) queries.push_back(&q);
  std::sort(queries.begin(), queries.end(),
            [](const auto* a, const auto* b) { return a->query_id < b->query_id; });

  std::vector<UtilityRecord> out;
  for (const auto* q : queries) {
    for (const auto& doc_id : ds.pool(q->query_id).doc_ids) {
      const auto& doc = ds.doc(doc_id);
      double u = gen.expected_utility(q->question_tokens, doc.tokens, q->answer_tokens);
      u = apply_noise(u, noise, q->query_id, doc_id);
      out.push_back({q->query_id, doc_id, u});
    }
  }
  return out;
}

std::vector<TokenSeq> oracle_training_corpus(const data::Dataset& ds,
                                             std::span<const std::string> answer_query_ids) {
  std::vector<TokenSeq> corpus;
  for (const auto& d : ds.documents()) corpus.push_back(d.tokens);
  for (const auto& id : answer_query_ids) {
    for (const auto& a : ds.query(id).answer_tokens) {
      TokenSeq seq;
      seq.push_back(data::kSep);
      seq.insert(seq.end(), a.begin(), a.end());
      seq.push_back(data::kEos);
      corpus.push_back(std::move(seq));
    }
  }
  return corpus;
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  if (values.empty()) return {};
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn;
  const double hi = *mx > *mn ? *mx : *mn + 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    out[i].lo = lo + width * static_cast<double>(i);
    out[i].hi = i + 1 == bins ? hi : lo + width * static_cast<double>(i + 1);
  }
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    ++out[std::min(b, bins - 1)].count;
  }
  return out;
}

void write_histogram_csv(const std::filesystem::path& path,
                         std::span<const HistogramBin> bins) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out.precision(17);
  out << "bin_lo,bin_hi,count\n";
  for (const auto& b : bins) out << b.lo << ',' << b.hi << ',' << b.count << '\n';
}

void write_utilities(const std::filesystem::path& path,
                     std::span<const UtilityRecord> records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (const auto& r : records) {
    nlohmann::ordered_json j{{"query_id", r.query_id}, {"doc_id", r.doc_id},
                             {"utility", r.utility}};
    out << j.dump() << '\n';
  }
}

std::vector<UtilityRecord> read_utilities(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  std::vector<UtilityRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    try {
      auto j = nlohmann::json::parse(line);
      if (!j.is_object() || j.size() != 3) throw IngestError("bad utility record", lineno);
      UtilityRecord r{j.at("query_id").get<std::string>(), j.at("doc_id").get<std::string>(),
                      j.at("utility").get<double>()};
      if (!std::isfinite(r.utility) || r.utility <= 0.0 || r.utility > 1.0) {
        throw IngestError("utility outside (0, 1]", lineno);
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw IngestError(path.filename().string() + ": " + e.what(), lineno);
    }
  }
  return out;
}

}  // namespace uae::oracle
