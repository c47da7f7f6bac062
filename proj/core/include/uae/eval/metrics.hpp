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

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace uae::eval {

/// query_id -> ranked doc_ids, best first.
using RunRanking = std::map<std::string, std::vector<std::string>>;

struct Judgments {
  std::map<std::string, std::set<std::string>> gold;
  std::map<std::string, std::map<std::string, double>> utility;
  /// When set, a document is relevant iff its utility >= threshold;
  /// otherwise relevance is gold membership.
  bool threshold_relevance = false;
  double threshold = 0.1;

  std::set<std::string> relevant(const std::string& query_id) const;
  std::vector<std::string> query_ids() const;
  std::optional<double> utility_of(const std::string& query_id, const std::string& doc_id) const;
};

struct MetricSummary {
  double value = 0.0;
  std::size_t counted = 0;
  std::vector<std::string> flagged;
  std::map<std::string, double> per_query;
};

/// Fraction of judged queries with a relevant document in the top k. Queries
/// missing from the ranking score 0 and are flagged.
MetricSummary recall_at_k(const RunRanking& run, const Judgments& j, std::size_t k);

/// Average precision over the full ranking, normalized by the number of
/// relevant documents.
double average_precision(std::span<const std::string> ranked,
                         const std::set<std::string>& relevant);

/// Mean AP; queries with no relevant documents are skipped and flagged.
MetricSummary mean_average_precision(const RunRanking& run, const Judgments& j);

/// Mean utility of the rank-1 document. `on_missing` supplies utilities that
/// are not in the judgments (e.g. by querying the oracle).
MetricSummary exp_util_at_1(
    const RunRanking& run, const Judgments& j,
    const std::function<double(const std::string&, const std::string&)>& on_missing = {});

/// One candidate of a pool: a scorer's output and its oracle utility.
struct PoolEntry {
  std::string doc_id;
  double score = 0.0;
  double utility = 0.0;
};

/// utility(top-1 by score) / max utility. Ties in score go to the smaller
/// doc_id. Undefined (nullopt) when every utility is <= 0.
std::optional<double> ndcg_at_1(std::span<const PoolEntry> pool);

/// Fraction of pairs with utility gap > min_gap that the scorer orders
/// strictly the same way. nullopt when there are no such pairs.
std::optional<double> pairwise_accuracy(std::span<const PoolEntry> pool, double min_gap);

}  // namespace uae::eval
