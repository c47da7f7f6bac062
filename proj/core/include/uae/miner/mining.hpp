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
#include <functional>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "uae/data/dataset.hpp"
#include "uae/miner/bm25.hpp"
#include "uae/ranking.hpp"
#include "uae/reward/training.hpp"

namespace uae::miner {

/// Base similarity S_sem: the top k documents for a query, best first,
/// skipping `exclude`.
using SemanticRanker = std::function<std::vector<ScoredDoc>(
    const data::QaExample&, std::size_t k, const std::set<std::string>& exclude)>;

SemanticRanker bm25_ranker(const Bm25Index& index);

enum class DeltaMode { PoolStd, Fixed };

struct MinerCfg {
  std::size_t k = 20;
  std::size_t m = 7;
  DeltaMode delta_mode = DeltaMode::PoolStd;
  double delta_scale = 0.5;  // PoolStd: delta = scale * std of pool rewards
  double delta_fixed = 0.0;  // Fixed: delta used as is
};

DeltaMode parse_delta_mode(const std::string& s);
std::string to_string(DeltaMode mode);

struct MinedCandidate {
  std::string doc_id;
  double sem_score = 0.0;
  std::size_t sem_rank = 0;  // 1-based
  double reward = 0.0;
  double gap = 0.0;  // R(q, d+) - R(q, d)
};

struct GateResult {
  double gold_reward = 0.0;
  std::size_t considered = 0;
  std::vector<MinedCandidate> accepted;  // S_sem order
};

/// Top-k candidates by S_sem with every gold document of `query` excluded,
/// kept when R(q, gold) - R(q, d) > delta. Nothing is truncated.
GateResult gate(const data::QaExample& query, const data::Document& gold,
                const reward::PairScorer& reward, const data::Dataset& ds,
                const SemanticRanker& ranker, std::size_t k, double delta);

/// The first m documents of gate(...), hardest first. May be empty.
std::vector<std::string> mine(const data::QaExample& query, const data::Document& gold,
                              const reward::PairScorer& reward, const data::Dataset& ds,
                              const SemanticRanker& ranker, std::size_t k, double delta,
                              std::size_t m);

/// scale * population std of the rewards of the query's pool.
double pool_delta(const data::QaExample& query, const reward::PairScorer& reward,
                  const data::Dataset& ds, double scale);

struct NegativeRecord {
  std::string query_id;
  std::vector<std::string> negative_doc_ids;
  bool backfilled = false;
  double delta = 0.0;
  double gold_reward = 0.0;

  friend bool operator==(const NegativeRecord&, const NegativeRecord&) = default;
};

struct MiningReport {
  std::size_t queries = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  std::string delta_mode;
  double delta_scale = 0.0;
  double mean_delta = 0.0;
  std::size_t candidates_considered = 0;
  std::size_t gate_rejected = 0;
  std::size_t gated_in = 0;
  std::size_t negatives_emitted = 0;
  std::size_t backfilled_queries = 0;
  std::vector<std::string> backfilled_query_ids;
};

struct MiningResult {
  std::vector<NegativeRecord> negatives;  // in query_ids order
  MiningReport report;
};

/// Mines every query in `query_ids`. The gold document is the first listed
/// gold. A query whose gate admits nothing gets the m lowest-reward non-gold
/// documents of its pool instead and is flagged as backfilled. Queries are
/// processed in parallel; the result does not depend on the thread count.
MiningResult mine_all(const data::Dataset& ds, std::span<const std::string> query_ids,
                      const reward::PairScorer& reward, const SemanticRanker& ranker,
                      const MinerCfg& cfg, std::size_t threads = 0);

struct MiningAudit {
  std::size_t checked = 0;
  std::size_t rank_violations = 0;
  std::size_t gap_violations = 0;
  std::size_t gold_negatives = 0;
  std::size_t duplicates = 0;

  bool ok() const {
    return rank_violations == 0 && gap_violations == 0 && gold_negatives == 0 && duplicates == 0;
  }
};

/// Re-derives both gate conditions for every non-backfilled negative, and
/// checks gold exclusion and uniqueness for all of them.
MiningAudit audit(std::span<const NegativeRecord> negatives, const data::Dataset& ds,
                  const reward::PairScorer& reward, const SemanticRanker& ranker,
                  std::size_t k);

void write_negatives(const std::filesystem::path& path,
                     std::span<const NegativeRecord> records);
std::vector<NegativeRecord> read_negatives(const std::filesystem::path& path);
void write_mining_report(const std::filesystem::path& path, const MiningReport& report);

}  // namespace uae::miner
