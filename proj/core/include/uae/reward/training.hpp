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
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "uae/data/dataset.hpp"
#include "uae/oracle/scoring.hpp"
#include "uae/reward/reward_model.hpp"

namespace uae::reward {

/// (q, d_i, d_j) with U(q, d_i) - U(q, d_j) = u_gap > min_gap.
struct Quadruplet {
  std::string query_id;
  std::string doc_i;  // higher utility
  std::string doc_j;
  double u_gap = 0.0;

  friend bool operator==(const Quadruplet&, const Quadruplet&) = default;
};

struct RewardTrainCfg {
  double margin = 0.1;         // hinge margin
  double min_gap = 0.02;       // minimum utility gap for a training pair
  std::size_t pairs_per_query = 32;
  double lr = 1e-3;
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  double weight_decay = 1e-5;
  std::uint64_t seed = 0;
  std::size_t dim = 64;
  std::size_t hidden = 512;
};

struct QuadrupletSet {
  std::vector<Quadruplet> quads;
  std::size_t skipped_queries = 0;  // fewer than two scored documents
};

/// Per query: every ordered pair with gap > min_gap, largest gap first, ties by
/// (doc_i, doc_j), truncated to pairs_per_query. Queries in query_id order.
QuadrupletSet build_quadruplets(std::span<const oracle::UtilityRecord> records,
                                const RewardTrainCfg& cfg);

/// max(0, margin - (s_i - s_j)).
double hinge_loss(double s_i, double s_j, double margin);

/// Mean hinge loss over `quads` plus (weight_decay / 2) * ||params||^2. When
/// `grad` is non-empty it receives the gradient (overwritten). At the kink the
/// zero branch is taken.
double reward_objective(const RewardScorer& scorer, const data::Dataset& ds,
                        std::span<const Quadruplet> quads, double margin,
                        double weight_decay, std::span<double> grad = {});

struct RewardTrainResult {
  RewardScorer scorer;
  std::vector<double> epoch_loss;  // mean hinge loss seen during each epoch
};

RewardTrainResult train_reward(const data::Dataset& ds, std::span<const Quadruplet> quads,
                               const RewardTrainCfg& cfg);

/// Continues training from `init`.
RewardTrainResult train_reward(RewardScorer init, const data::Dataset& ds,
                               std::span<const Quadruplet> quads, const RewardTrainCfg& cfg);

/// Any (query, document) scorer: the reward model, BM25, a constant...
using PairScorer = std::function<double(const data::QaExample&, const data::Document&)>;

struct RewardValidation {
  double ndcg_at_1 = 0.0;
  double pairwise_accuracy = 0.0;
  std::size_t ndcg_queries = 0;
  std::size_t pairwise_queries = 0;
  std::size_t skipped = 0;
};

using UtilityTable = std::map<std::string, std::map<std::string, double>>;
UtilityTable utility_table(std::span<const oracle::UtilityRecord> records);

/// Scores every pool document of the held-out queries and compares against
/// oracle utilities: mean NDCG@1 (gain = utility) and mean per-query pairwise
/// accuracy over pairs with gap > min_gap.
RewardValidation validate_reward(const PairScorer& scorer, const data::Dataset& ds,
                                 std::span<const std::string> query_ids,
                                 const UtilityTable& utilities, double min_gap);

PairScorer as_pair_scorer(const RewardScorer& scorer);

struct RewardRecord {
  std::string query_id;
  std::string doc_id;
  double reward = 0.0;
};
void write_rewards(const std::filesystem::path& path, std::span<const RewardRecord> records);
std::vector<RewardRecord> read_rewards(const std::filesystem::path& path);

}  // namespace uae::reward
