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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "json.hpp"

#include "test_util.hpp"
#include "uae/eval/answer_metrics.hpp"
#include "uae/eval/generation.hpp"
#include "uae/eval/latency.hpp"
#include "uae/eval/metrics.hpp"
#include "uae/eval/report.hpp"
#include "uae/oracle/scoring.hpp"

namespace uae::eval {
namespace {

// Independent references, written from the definitions.
double brute_ap(const std::vector<std::string>& ranked, const std::set<std::string>& rel) {
  if (rel.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (!rel.contains(ranked[i])) continue;
    std::size_t hits = 0;
    for (std::size_t j = 0; j <= i; ++j) hits += rel.contains(ranked[j]);
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(rel.size());
}

bool brute_hit(const std::vector<std::string>& ranked, const std::set<std::string>& rel,
               std::size_t k) {
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    if (rel.contains(ranked[i])) return true;
  }
  return false;
}

TEST(RankMetrics, MatchBruteForceOnRandomRankings) {
  std::mt19937_64 rng(2026);
  RunRanking run;
  Judgments j;
  std::map<std::string, double> ap, r1, r3;
  for (int q = 0; q < 1000; ++q) {
    const std::string qid = "q" + std::to_string(q);
    const std::size_t n = 2 + rng() % 15;
    std::vector<std::string> docs;
    for (std::size_t i = 0; i < n; ++i) docs.push_back("d" + std::to_string(i));
    std::shuffle(docs.begin(), docs.end(), rng);
    std::set<std::string> rel;
    for (const auto& d : docs) {
      if (rng() % 4 == 0) rel.insert(d);
    }
    if (rel.empty()) rel.insert(docs[rng() % n]);
    run[qid] = docs;
    j.gold[qid] = rel;
    ap[qid] = brute_ap(docs, rel);
    r1[qid] = brute_hit(docs, rel, 1);
    r3[qid] = brute_hit(docs, rel, 3);
  }
  const auto map = mean_average_precision(run, j);
  const auto rec1 = recall_at_k(run, j, 1);
  const auto rec3 = recall_at_k(run, j, 3);
  double map_ref = 0.0, r1_ref = 0.0, r3_ref = 0.0;
  for (const auto& [qid, v] : ap) {
    EXPECT_NEAR(map.per_query.at(qid), v, 1e-12);
    EXPECT_NEAR(average_precision(run[qid], j.gold[qid]), v, 1e-12);
    EXPECT_EQ(rec1.per_query.at(qid), r1[qid]);
    EXPECT_EQ(rec3.per_query.at(qid), r3[qid]);
    map_ref += v;
    r1_ref += r1[qid];
    r3_ref += r3[qid];
  }
  EXPECT_NEAR(map.value, map_ref / 1000.0, 1e-12);
  EXPECT_NEAR(rec1.value, r1_ref / 1000.0, 1e-12);
  EXPECT_NEAR(rec3.value, r3_ref / 1000.0, 1e-12);
  EXPECT_EQ(map.counted, 1000u);
}

TEST(PoolMetrics, MatchBruteForceOnRandomPools) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + rng() % 12;
    std::vector<PoolEntry> pool;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse scores produce ties.
      pool.push_back({"d" + std::to_string(i), std::floor(u(rng) * 5.0), std::round(u(rng) * 20) / 20});
    }
    // NDCG@1: the top by (score desc, doc_id asc) over the max utility.
    const auto top = *std::min_element(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
      return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
    });
    double best = 0.0;
    for (const auto& e : pool) best = std::max(best, e.utility);
    const auto ndcg = ndcg_at_1(pool);
    if (best <= 0.0) {
      EXPECT_FALSE(ndcg.has_value());
    } else {
      ASSERT_TRUE(ndcg.has_value());
      EXPECT_NEAR(*ndcg, top.utility / best, 1e-12);
    }
    std::size_t pairs = 0, agree = 0;
    for (const auto& a : pool) {
      for (const auto& b : pool) {
        if (a.utility - b.utility > 0.1) {
          ++pairs;
          agree += a.score > b.score;
        }
      }
    }
    const auto acc = pairwise_accuracy(pool, 0.1);
    if (pairs == 0) {
      EXPECT_FALSE(acc.has_value());
    } else {
      ASSERT_TRUE(acc.has_value());
      EXPECT_NEAR(*acc, static_cast<double>(agree) / static_cast<double>(pairs), 1e-12);
    }
  }
}

TEST(RankMetrics, HandExamples) {
  const std::vector<std::string> ranked{"a", "b", "c"};
  EXPECT_NEAR(average_precision(ranked, {"a", "c"}), 0.8333333333333334, 1e-12);
  const std::vector<PoolEntry> pool{{"x", 1.0, 0.4}, {"y", 0.0, 0.8}};
  EXPECT_DOUBLE_EQ(*ndcg_at_1(pool), 0.5);
}

TEST(PoolMetrics, ConstantScorerIsFullyDiscordant) {
  const std::vector<PoolEntry> pool{{"a", 1.0, 0.9}, {"b", 1.0, 0.5}, {"c", 1.0, 0.1}};
  EXPECT_DOUBLE_EQ(*pairwise_accuracy(pool, 0.02), 0.0);
  const std::vector<PoolEntry> perfect{{"a", 3.0, 0.9}, {"b", 2.0, 0.5}, {"c", 1.0, 0.1}};
  EXPECT_DOUBLE_EQ(*pairwise_accuracy(perfect, 0.02), 1.0);
  EXPECT_DOUBLE_EQ(*ndcg_at_1(perfect), 1.0);
}

TEST(RankMetrics, MissingQueriesFlagged) {
  Judgments j;
  j.gold["q1"] = {"a"};
  j.gold["q2"] = {"b"};
  const RunRanking run{{"q1", {"a"}}};
  const auto r = recall_at_k(run, j, 1);
  EXPECT_DOUBLE_EQ(r.value, 0.5);
  EXPECT_EQ(r.flagged, std::vector<std::string>{"q2"});
}

TEST(RankMetrics, ThresholdRelevance) {
  Judgments j;
  j.gold["q"] = {"a"};
  j.utility["q"] = {{"a", 0.05}, {"b", 0.3}};
  j.threshold_relevance = true;
  j.threshold = 0.1;
  EXPECT_EQ(j.relevant("q"), std::set<std::string>{"b"});
}

TEST(ExpUtil, UsesTopDocumentAndFallback) {
  Judgments j;
  j.gold["q"] = {"a"};
  j.utility["q"] = {{"a", 0.6}};
  const RunRanking run{{"q", {"b", "a"}}};
  const auto r = exp_util_at_1(run, j, [](const std::string&, const std::string& d) {
    return d == "b" ? 0.25 : 0.0;
  });
  EXPECT_DOUBLE_EQ(r.value, 0.25);
}

TEST(AnswerMetrics, HandExamples) {
  const std::vector<std::string> gold{"apple pie"};
  EXPECT_NEAR(token_f1("red apple pie", gold), 0.8, 1e-12);
  const std::vector<std::string> p{"a1", "b1", "c1", "d1"}, g{"a1", "c1", "d1"};
  EXPECT_NEAR(rouge_l(p, g), 0.8571428571428571, 1e-12);
}

TEST(AnswerMetrics, NormalizationAndEdgeCases) {
  EXPECT_EQ(answer_tokens("The Eiffel-Tower, an icon!"),
            (std::vector<std::string>{"eiffeltower", "icon"}));
  const std::vector<std::string> none;
  EXPECT_DOUBLE_EQ(token_f1(none, none), 1.0);
  EXPECT_DOUBLE_EQ(rouge_l(none, none), 1.0);
  const std::vector<std::string> x{"x"};
  EXPECT_DOUBLE_EQ(token_f1(x, none), 0.0);
  const std::vector<std::string> answers{"paris", "city of paris"};
  EXPECT_DOUBLE_EQ(token_f1("Paris", answers), 1.0);
}

TEST(AnswerMetrics, BoundedAndSymmetric) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    std::vector<std::string> a(rng() % 6), b(rng() % 6);
    for (auto& w : a) w = std::string(1, static_cast<char>('a' + rng() % 4));
    for (auto& w : b) w = std::string(1, static_cast<char>('a' + rng() % 4));
    const double f = token_f1(a, b), r = rouge_l(a, b);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, f + 1e-12);  // an LCS never beats the bag overlap
    EXPECT_NEAR(f, token_f1(b, a), 1e-12);
    EXPECT_NEAR(r, rouge_l(b, a), 1e-12);
  }
}

TEST(Generation, MemorizedAnswerScoresOne) {
  const auto ds = testing::toy_dataset(
      {"the capital of france is paris", "the capital of france is beautiful"},
      {"what is the capital of france"}, {"paris"});
  const std::vector<std::string> ids{"q0"};
  const auto gen = oracle::Generator::train(oracle::oracle_training_corpus(ds, ids),
                                            ds.tokenizer().size(), oracle::OracleConfig{});
  const auto good = generation_eval({{"q0", {"d0", "d1"}}}, gen, ds);
  EXPECT_EQ(good.predictions.at("q0"), "paris");
  EXPECT_DOUBLE_EQ(good.gen_f1, 1.0);
  EXPECT_DOUBLE_EQ(good.rouge_l, 1.0);
  const auto bad = generation_eval({{"q0", {"d1", "d0"}}}, gen, ds);
  EXPECT_DOUBLE_EQ(bad.gen_f1, 0.0);
  EXPECT_THROW(generation_eval({{"q0", {}}}, gen, ds), ValidationError);
}

TEST(Latency, CountsAndSpeedup) {
  std::size_t index_calls = 0, rerank_calls = 0;
  LatencyPaths paths{[&](std::size_t) { ++index_calls; },
                     [&](std::size_t) {
                       ++rerank_calls;
                       volatile double x = 0.0;
                       for (int i = 0; i < 20000; ++i) x = x + i;
                       return std::size_t{50};
                     }};
  const auto r = latency_bench(paths, 50, 3, 1);
  EXPECT_EQ(r.index_path.samples, 150u);
  EXPECT_EQ(r.rerank_path.samples, 150u);
  EXPECT_EQ(index_calls, 200u);
  EXPECT_EQ(rerank_calls, 200u);
  EXPECT_DOUBLE_EQ(r.rerank_evals_per_query, 50.0);
  EXPECT_GT(r.speedup, 1.0);
  EXPECT_THROW(latency_bench(paths, 50, 0), ConfigError);
  EXPECT_THROW(latency_bench(paths, 0, 1), ConfigError);
}

TEST(Latency, Summary) {
  const std::vector<double> s{5.0, 1.0, 3.0, 2.0, 4.0};
  const auto st = summarize_latency(s);
  EXPECT_DOUBLE_EQ(st.median_ms, 3.0);
  EXPECT_DOUBLE_EQ(st.mean_ms, 3.0);
  EXPECT_DOUBLE_EQ(st.p95_ms, 5.0);
  EXPECT_THROW(summarize_latency(std::vector<double>{}), Error);
}

TEST(Report, TimingsOnlyUnderLatencyKey) {
  EvalReport r;
  r.queries = 1;
  MethodMetrics m;
  m.name = "uae";
  m.recall = {{1, 1.0}};
  r.methods.push_back(m);
  r.latency = LatencyReport{{1.0, 1.0, 1.0, 1}, {10.0, 10.0, 10.0, 1}, 10.0, 50.0, 1, 1};
  r.latency_path = {{"uae", "index"}};
  auto j = nlohmann::json::parse(report_json(r));
  ASSERT_TRUE(j.contains("latency"));
  j.erase("latency");
  EXPECT_EQ(j.dump().find("_ms"), std::string::npos);
  EXPECT_EQ(j.dump().find("speedup"), std::string::npos);

  testing::TempDir dir("report");
  write_report_csv(dir / "r.csv", r);
  write_efficiency_csv(dir / "e.csv", r);
  EXPECT_TRUE(std::filesystem::exists(dir / "r.csv"));
  const RunRanking run{{"q1", {"a", "b"}}, {"q2", {"c"}}};
  write_run(dir / "run.jsonl", run);
  EXPECT_EQ(read_run(dir / "run.jsonl"), run);
}

TEST(Report, ToRankingOrdersByScoreThenId) {
  const ScoredRun s{{"q", {{"b", 1.0}, {"a", 1.0}, {"c", 2.0}}}};
  EXPECT_EQ(to_ranking(s).at("q"), (std::vector<std::string>{"c", "a", "b"}));
}

}  // namespace
}  // namespace uae::eval
