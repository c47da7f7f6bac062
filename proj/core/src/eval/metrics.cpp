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

#include "uae/eval/metrics.hpp"

#include <algorithm>

#include "uae/common.hpp"

namespace uae::eval {

std::set<std::string> Judgments::relevant(const std::string& query_id) const {
  if (!threshold_relevance) {
    auto it = gold.find(query_id);
    return it == gold.end() ? std::set<std::string>{} : it->second;
  }
  std::set<std::string> out;
  auto it = utility.find(query_id);
  if (it == utility.end()) return out;
  for (const auto& [doc, u] : it->second) {
    if (u >= threshold) out.insert(doc);
  }
  return out;
}

std::vector<std::string> Judgments::query_ids() const {
  std::set<std::string> ids;
  if (threshold_relevance) {
    for (const auto& [q, _] : utility) ids.insert(q);
  } else {
    for (const auto& [q, _] : gold) ids.insert(q);
  }
  return {ids.begin(), ids.end()};
}

std::optional<double> Judgments::utility_of(const std::string& query_id,
                                            const std::string& doc_id) const {
  auto it = utility.find(query_id);
  if (it == utility.end()) return std::nullopt;
  auto jt = it->second.find(doc_id);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

MetricSummary recall_at_k(const RunRanking& run, const Judgments& j, std::size_t k) {
  if (k < 1) throw ConfigError("recall cutoff k must be >= 1");
  MetricSummary out;
  double sum = 0.0;
  for (const auto& qid : j.query_ids()) {
    auto it = run.find(qid);
    double hit = 0.0;
    if (it == run.end()) {
      out.flagged.push_back(qid);
    } else {
      const auto rel = j.relevant(qid);
      const auto n = std::min(k, it->second.size());
      for (std::size_t r = 0; r < n && hit == 0.0; ++r) {
        if (rel.contains(it->second[r])) hit = 1.0;
      }
    }
    out.per_query[qid] = hit;
    sum += hit;
    ++out.counted;
  }
  out.value = out.counted ? sum / static_cast<double>(out.counted) : 0.0;
  return out;
}

double average_precision(std::span<const std::string> ranked,
                         const std::set<std::string>& relevant) {
  if (relevant.empty()) return 0.0;
  double hits = 0.0, sum = 0.0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (relevant.contains(ranked[r])) {
      hits += 1.0;
      sum += hits / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

MetricSummary mean_average_precision(const RunRanking& run, const Judgments& j) {
  MetricSummary out;
  double sum = 0.0;
  for (const auto& qid : j.query_ids()) {
    const auto rel = j.relevant(qid);
    if (rel.empty()) {
      out.flagged.push_back(qid);
      continue;
    }
    auto it = run.find(qid);
    double ap = 0.0;
    if (it == run.end()) {
      out.flagged.push_back(qid);
    } else {
      ap = average_precision(it->second, rel);
    }
    out.per_query[qid] = ap;
    sum += ap;
    ++out.counted;
  }
  out.value = out.counted ? sum / static_cast<double>(out.counted) : 0.0;
  return out;
}

MetricSummary exp_util_at_1(
    const RunRanking& run, const Judgments& j,
    const std::function<double(const std::string&, const std::string&)>& on_missing) {
  MetricSummary out;
  double sum = 0.0;
  for (const auto& [qid, ranked] : run) {
    double u = 0.0;
    if (ranked.empty()) {
      out.flagged.push_back(qid);
    } else if (auto known = j.utility_of(qid, ranked.front())) {
      u = *known;
    } else if (on_missing) {
      u = on_missing(qid, ranked.front());
    } else {
      throw ValidationError("no utility for top-1 document \"" + ranked.front() +
                            "\" of query \"" + qid + "\"");
    }
    out.per_query[qid] = u;
    sum += u;
    ++out.counted;
  }
  out.value = out.counted ? sum / static_cast<double>(out.counted) : 0.0;
  return out;
}

std::optional<double> ndcg_at_1(std::span<const PoolEntry> pool) {
  if (pool.empty()) return std::nullopt;
  const PoolEntry* top = &pool[0];
  double best_u = pool[0].utility;
  for (const auto& e : pool) {
    if (e.score > top->score || (e.score == top->score && e.doc_id < top->doc_id)) top = &e;
    best_u = std::max(best_u, e.utility);
  }
  if (!(best_u > 0.0)) return std::nullopt;
  return top->utility / best_u;
}

std::optional<double> pairwise_accuracy(std::span<const PoolEntry> pool, double min_gap) {
  std::size_t pairs = 0, concordant = 0;
  for (const auto& a : pool) {
    for (const auto& b : pool) {
      if (a.utility - b.utility > min_gap) {
        ++pairs;
        if (a.score > b.score) ++concordant;
      }
    }
  }
  if (pairs == 0) return std::nullopt;
  return static_cast<double>(concordant) / static_cast<double>(pairs);
}

}  // namespace uae::eval
