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

#include "uae/reward/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "uae/eval/metrics.hpp"
#include "uae/optim.hpp"

namespace uae::reward {

QuadrupletSet build_quadruplets(std::span<const oracle::UtilityRecord> records,
                                const RewardTrainCfg& cfg) {
  if (cfg.min_gap < 0.0) throw ConfigError("min_gap must be >= 0");
  std::map<std::string, std::vector<const oracle::UtilityRecord*>> by_query;
  for (const auto& r : records) by_query[r.query_id].push_back(&r);

  QuadrupletSet out;
  for (const auto& [qid, recs] : by_query) {
    if (recs.size() < 2) {
      ++out.skipped_queries;
      continue;
    }
    std::vector<Quadruplet> pairs;
    for (const auto* a : recs) {
      for (const auto* b : recs) {
        if (a->doc_id == b->doc_id) continue;
        const double gap = a->utility - b->utility;
        if (gap > cfg.min_gap) pairs.push_back({qid, a->doc_id, b->doc_id, gap});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Quadruplet& x, const Quadruplet& y) {
      if (x.u_gap != y.u_gap) return x.u_gap > y.u_gap;
      if (x.doc_i != y.doc_i) return x.doc_i < y.doc_i;
      return x.doc_j < y.doc_j;
    });
    if (pairs.size() > cfg.pairs_per_query) pairs.resize(cfg.pairs_per_query);
    out.quads.insert(out.quads.end(), pairs.begin(), pairs.end());
  }
  return out;
}

double hinge_loss(double s_i, double s_j, double margin) {
  return std::max(0.0, margin - (s_i - s_j));
}

namespace {

double objective_impl(const RewardScorer& scorer, const data::Dataset& ds,
                      std::span<const Quadruplet> quads, double margin, double weight_decay,
                      std::span<double> grad, double* hinge_mean) {
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  if (quads.empty()) throw ValidationError("reward objective over an empty quadruplet set");

  const double inv_n = 1.0 / static_cast<double>(quads.size());
  double sum = 0.0;
  for (const auto& quad : quads) {
    const auto& q = ds.query(quad.query_id).question_tokens;
    const auto& di = ds.doc(quad.doc_i).tokens;
    const auto& dj = ds.doc(quad.doc_j).tokens;
    const double si = scorer.score(q, di);
    const double sj = scorer.score(q, dj);
    const double slack = margin - (si - sj);
    if (slack > 0.0) {
      sum += slack;
      if (want_grad) {
        scorer.accumulate_grad(q, di, -inv_n, grad);
        scorer.accumulate_grad(q, dj, inv_n, grad);
      }
    }
  }
  const double hinge = sum * inv_n;
  if (hinge_mean) *hinge_mean = hinge;

  double reg = 0.0;
  if (weight_decay != 0.0) {
    const auto p = scorer.params();
    for (std::size_t i = 0; i < p.size(); ++i) {
      reg += p[i] * p[i];
      if (want_grad) grad[i] += weight_decay * p[i];
    }
    reg *= 0.5 * weight_decay;
  }
  return hinge + reg;
}

}  // namespace

double reward_objective(const RewardScorer& scorer, const data::Dataset& ds,
                        std::span<const Quadruplet> quads, double margin, double weight_decay,
                        std::span<double> grad) {
  return objective_impl(scorer, ds, quads, margin, weight_decay, grad, nullptr);
}

RewardTrainResult train_reward(const data::Dataset& ds, std::span<const Quadruplet> quads,
                               const RewardTrainCfg& cfg) {
  RewardScorer init({ds.tokenizer().size(), cfg.dim, cfg.hidden},
                    derive_seed(cfg.seed, "reward-init"));
  return train_reward(std::move(init), ds, quads, cfg);
}

RewardTrainResult train_reward(RewardScorer init, const data::Dataset& ds,
                               std::span<const Quadruplet> quads, const RewardTrainCfg& cfg) {
  if (quads.empty()) throw ValidationError("no quadruplets to train the reward model on");
  if (!(cfg.margin > 0.0)) throw ConfigError("reward margin must be > 0");
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (init.dims().vocab_size != ds.tokenizer().size()) {
    throw ConfigError("reward model vocabulary does not match the dataset");
  }

  RewardTrainResult result{std::move(init), {}};
  auto& scorer = result.scorer;
  Adam opt(scorer.num_params(), {.lr = cfg.lr});
  std::vector<double> grad(scorer.num_params());
  std::vector<std::size_t> order(quads.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(cfg.seed, "reward-shuffle"));
  std::vector<Quadruplet> batch;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      batch.clear();
      const auto end = std::min(order.size(), start + cfg.batch_size);
      for (std::size_t i = start; i < end; ++i) batch.push_back(quads[order[i]]);
      double hinge = 0.0;
      const double loss =
          objective_impl(scorer, ds, batch, cfg.margin, cfg.weight_decay, grad, &hinge);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite reward loss at epoch " << epoch << ", batch " << batches
            << " (hinge=" << hinge << ", first query " << batch.front().query_id << ")";
        throw TrainingError(msg.str());
      }
      opt.step(scorer.params(), grad);
      epoch_sum += hinge;
      ++batches;
    }
    result.epoch_loss.push_back(epoch_sum / static_cast<double>(batches));
  }
  return result;
}

UtilityTable utility_table(std::span<const oracle::UtilityRecord> records) {
  UtilityTable t;
  for (const auto& r : records) t[r.query_id][r.doc_id] = r.utility;
  return t;
}

RewardValidation validate_reward(const PairScorer& scorer, const data::Dataset& ds,
                                 std::span<const std::string> query_ids,
                                 const UtilityTable& utilities, double min_gap) {
  RewardValidation v;
  double ndcg_sum = 0.0, pair_sum = 0.0;
  for (const auto& qid : query_ids) {
    const auto& q = ds.query(qid);
    auto ut = utilities.find(qid);
    if (ut == utilities.end()) {
      ++v.skipped;
      continue;
    }
    std::vector<eval::PoolEntry> pool;
    for (const auto& doc_id : ds.pool(qid).doc_ids) {
      auto u = ut->second.find(doc_id);
      if (u == ut->second.end()) continue;
      pool.push_back({doc_id, scorer(q, ds.doc(doc_id)), u->second});
    }
    if (auto n = eval::ndcg_at_1(pool)) {
      ndcg_sum += *n;
      ++v.ndcg_queries;
    } else {
      ++v.skipped;
    }
    if (auto p = eval::pairwise_accuracy(pool, min_gap)) {
      pair_sum += *p;
      ++v.pairwise_queries;
    }
  }
  if (v.ndcg_queries) v.ndcg_at_1 = ndcg_sum / static_cast<double>(v.ndcg_queries);
  if (v.pairwise_queries) {
    v.pairwise_accuracy = pair_sum / static_cast<double>(v.pairwise_queries);
  }
  return v;
}

PairScorer as_pair_scorer(const RewardScorer& scorer) {
  return [&scorer](const data::QaExample& q, const data::Document& d) {
    return scorer.score(q.question_tokens, d.tokens);
  };
}

void write_rewards(const std::filesystem::path& path, std::span<const RewardRecord> records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (const auto& r : records) {
    nlohmann::ordered_json j{{"query_id", r.query_id}, {"doc_id", r.doc_id},
                             {"reward", r.reward}};
    out << j.dump() << '\n';
  }
}

std::vector<RewardRecord> read_rewards(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  std::vector<RewardRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    try {
      auto j = nlohmann::json::parse(line);
      out.push_back({j.at("query_id").get<std::string>(), j.at("doc_id").get<std::string>(),
                     j.at("reward").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw IngestError(path.filename().string() + ": " + e.what(), lineno);
    }
  }
  return out;
}

}  // namespace uae::reward
