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

#include "uae/miner/mining.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#include "json.hpp"

namespace uae::miner {

SemanticRanker bm25_ranker(const Bm25Index& index) {
  return [&index](const data::QaExample& q, std::size_t k, const std::set<std::string>& ex) {
    return index.topk(q.question_tokens, k, ex);
  };
}

DeltaMode parse_delta_mode(const std::string& s) {
  if (s == "pool_std") return DeltaMode::PoolStd;
  if (s == "fixed") return DeltaMode::Fixed;
  throw ConfigError("unknown delta mode \"" + s + "\" (expected pool_std or fixed)");
}

std::string to_string(DeltaMode mode) {
  return mode == DeltaMode::PoolStd ? "pool_std" : "fixed";
}

GateResult gate(const data::QaExample& query, const data::Document& gold,
                const reward::PairScorer& reward, const data::Dataset& ds,
                const SemanticRanker& ranker, std::size_t k, double delta) {
  const std::set<std::string> golds(query.gold_doc_ids.begin(), query.gold_doc_ids.end());
  GateResult out;
  out.gold_reward = reward(query, gold);
  const auto ranked = ranker(query, k, golds);
  out.considered = ranked.size();
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const auto& doc = ds.doc(ranked[r].doc_id);
    const double rd = reward(query, doc);
    const double gap = out.gold_reward - rd;
    if (gap > delta) out.accepted.push_back({doc.doc_id, ranked[r].score, r + 1, rd, gap});
  }
  return out;
}

std::vector<std::string> mine(const data::QaExample& query, const data::Document& gold,
                              const reward::PairScorer& reward, const data::Dataset& ds,
                              const SemanticRanker& ranker, std::size_t k, double delta,
                              std::size_t m) {
  const auto g = gate(query, gold, reward, ds, ranker, k, delta);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < g.accepted.size() && i < m; ++i) out.push_back(g.accepted[i].doc_id);
  return out;
}

namespace {

double population_std(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

struct QueryOutcome {
  NegativeRecord record;
  std::size_t considered = 0;
  std::size_t gated_in = 0;
};

QueryOutcome mine_one(const data::Dataset& ds, const data::QaExample& q,
                      const reward::PairScorer& reward, const SemanticRanker& ranker,
                      const MinerCfg& cfg) {
  if (q.gold_doc_ids.empty()) {
    throw ValidationError("query \"" + q.query_id + "\" has no gold document to mine against");
  }
  const auto& gold = ds.doc(q.gold_doc_ids.front());
  const std::set<std::string> golds(q.gold_doc_ids.begin(), q.gold_doc_ids.end());

  std::vector<std::pair<double, std::string>> pool_rewards;
  std::vector<double> rewards;
  for (const auto& id : ds.pool(q.query_id).doc_ids) {
    const double r = reward(q, ds.doc(id));
    rewards.push_back(r);
    if (!golds.contains(id)) pool_rewards.emplace_back(r, id);
  }

  QueryOutcome out;
  out.record.query_id = q.query_id;
  out.record.delta = cfg.delta_mode == DeltaMode::PoolStd
                         ? cfg.delta_scale * population_std(rewards)
                         : cfg.delta_fixed;
  const auto g = gate(q, gold, reward, ds, ranker, cfg.k, out.record.delta);
  out.record.gold_reward = g.gold_reward;
  out.considered = g.considered;
  out.gated_in = g.accepted.size();
  for (std::size_t i = 0; i < g.accepted.size() && i < cfg.m; ++i) {
    out.record.negative_doc_ids.push_back(g.accepted[i].doc_id);
  }
  if (out.record.negative_doc_ids.empty()) {
    out.record.backfilled = true;
    std::sort(pool_rewards.begin(), pool_rewards.end());
    for (std::size_t i = 0; i < pool_rewards.size() && i < cfg.m; ++i) {
      out.record.negative_doc_ids.push_back(pool_rewards[i].second);
    }
  }
  return out;
}

}  // namespace

double pool_delta(const data::QaExample& query, const reward::PairScorer& reward,
                  const data::Dataset& ds, double scale) {
  std::vector<double> rewards;
  for (const auto& id : ds.pool(query.query_id).doc_ids) rewards.push_back(reward(query, ds.doc(id)));
  return scale * population_std(rewards);
}

MiningResult mine_all(const data::Dataset& ds, std::span<const std::string> query_ids,
                      const reward::PairScorer& reward, const SemanticRanker& ranker,
                      const MinerCfg& cfg, std::size_t threads) {
  if (cfg.k < 1 || cfg.m < 1) throw ConfigError("miner k and m must be >= 1");
  if (cfg.delta_mode == DeltaMode::PoolStd && !(cfg.delta_scale >= 0.0)) {
    throw ConfigError("delta scale must be >= 0");
  }
  std::vector<QueryOutcome> outcomes(query_ids.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(1, query_ids.size()));

  if (threads == 1) {
    for (std::size_t i = 0; i < query_ids.size(); ++i) {
      outcomes[i] = mine_one(ds, ds.query(query_ids[i]), reward, ranker, cfg);
    }
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < query_ids.size(); i += threads) {
            outcomes[i] = mine_one(ds, ds.query(query_ids[i]), reward, ranker, cfg);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  MiningResult res;
  auto& rep = res.report;
  rep.queries = query_ids.size();
  rep.k = cfg.k;
  rep.m = cfg.m;
  rep.delta_mode = to_string(cfg.delta_mode);
  rep.delta_scale = cfg.delta_mode == DeltaMode::PoolStd ? cfg.delta_scale : 0.0;
  double delta_sum = 0.0;
  for (auto& o : outcomes) {
    rep.candidates_considered += o.considered;
    rep.gated_in += o.gated_in;
    rep.gate_rejected += o.considered - o.gated_in;
    rep.negatives_emitted += o.record.negative_doc_ids.size();
    delta_sum += o.record.delta;
    if (o.record.backfilled) {
      ++rep.backfilled_queries;
      rep.backfilled_query_ids.push_back(o.record.query_id);
    }
    res.negatives.push_back(std::move(o.record));
  }
  rep.mean_delta = rep.queries ? delta_sum / static_cast<double>(rep.queries) : 0.0;
  return res;
}

MiningAudit audit(std::span<const NegativeRecord> negatives, const data::Dataset& ds,
                  const reward::PairScorer& reward, const SemanticRanker& ranker,
                  std::size_t k) {
  MiningAudit a;
  for (const auto& rec : negatives) {
    const auto& q = ds.query(rec.query_id);
    const std::set<std::string> golds(q.gold_doc_ids.begin(), q.gold_doc_ids.end());
    std::set<std::string> seen;
    std::map<std::string, std::size_t> rank;
    if (!rec.backfilled) {
      const auto ranked = ranker(q, k, golds);
      for (std::size_t r = 0; r < ranked.size(); ++r) rank[ranked[r].doc_id] = r + 1;
    }
    const double gold_reward = reward(q, ds.doc(q.gold_doc_ids.front()));
    for (const auto& id : rec.negative_doc_ids) {
      ++a.checked;
      if (golds.contains(id)) ++a.gold_negatives;
      if (!seen.insert(id).second) ++a.duplicates;
      if (rec.backfilled) continue;
      auto it = rank.find(id);
      if (it == rank.end() || it->second > k) ++a.rank_violations;
      if (!(gold_reward - reward(q, ds.doc(id)) > rec.delta)) ++a.gap_violations;
    }
  }
  return a;
}

void write_negatives(const std::filesystem::path& path,
                     std::span<const NegativeRecord> records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (const auto& r : records) {
    nlohmann::ordered_json j{{"query_id", r.query_id},
                             {"negative_doc_ids", r.negative_doc_ids},
                             {"backfilled", r.backfilled}};
    out << j.dump() << '\n';
  }
}

std::vector<NegativeRecord> read_negatives(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  std::vector<NegativeRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    try {
      auto j = nlohmann::json::parse(line);
      NegativeRecord r;
      r.query_id = j.at("query_id").get<std::string>();
      r.negative_doc_ids = j.at("negative_doc_ids").get<std::vector<std::string>>();
      r.backfilled = j.at("backfilled").get<bool>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw IngestError(path.filename().string() + ": " + e.what(), lineno);
    }
  }
  return out;
}

void write_mining_report(const std::filesystem::path& path, const MiningReport& r) {
  nlohmann::ordered_json j{{"queries", r.queries},
                           {"k", r.k},
                           {"m", r.m},
                           {"delta_mode", r.delta_mode},
                           {"delta_scale", r.delta_scale},
                           {"mean_delta", r.mean_delta},
                           {"candidates_considered", r.candidates_considered},
                           {"gate_rejected", r.gate_rejected},
                           {"gated_in", r.gated_in},
                           {"negatives_emitted", r.negatives_emitted},
                           {"backfilled_queries", r.backfilled_queries},
                           {"backfilled_query_ids", r.backfilled_query_ids}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace uae::miner
