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
#include <fstream>
#include <random>

#include "test_util.hpp"
#include "uae/optim.hpp"
#include "uae/reward/reward_model.hpp"
#include "uae/reward/training.hpp"

namespace uae::reward {
namespace {

TokenSeq random_seq(std::mt19937_64& rng, std::size_t vocab) {
  std::uniform_int_distribution<std::size_t> len(1, 6);
  std::uniform_int_distribution<TokenId> tok(0, static_cast<TokenId>(vocab - 1));
  TokenSeq s(len(rng));
  for (auto& t : s) t = tok(rng);
  return s;
}

TEST(RewardScorer, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(123);
  for (std::size_t config = 0; config < 100; ++config) {
    const RewardDims dims{.vocab_size = 12, .dim = 3 + config % 3, .hidden = 4 + config % 5};
    RewardScorer s(dims, rng());
    // Non-zero biases so every block is exercised.
    std::normal_distribution<double> n(0.0, 0.3);
    for (auto& p : s.params()) p += 0.1 * n(rng);
    const auto q = random_seq(rng, dims.vocab_size);
    const auto d = random_seq(rng, dims.vocab_size);
    std::vector<double> grad(s.num_params(), 0.0);
    const double upstream = 0.5 + config % 4;
    s.accumulate_grad(q, d, upstream, grad);

    std::vector<double> numeric(s.num_params());
    const double h = 1e-6;
    for (std::size_t i = 0; i < s.num_params(); ++i) {
      const double orig = s.params()[i];
      s.params()[i] = orig + h;
      const double up = s.score(q, d);
      s.params()[i] = orig - h;
      const double down = s.score(q, d);
      s.params()[i] = orig;
      numeric[i] = upstream * (up - down) / (2.0 * h);
    }
    for (std::size_t i = 0; i < grad.size(); ++i) {
      ASSERT_LT(std::abs(grad[i] - numeric[i]), 1e-5 * std::max(1.0, std::abs(numeric[i])))
          << "config " << config << " param " << i;
    }
  }
}

TEST(RewardScorer, OutOfVocabularyRejected) {
  RewardScorer s({.vocab_size = 8, .dim = 2, .hidden = 3}, 1);
  EXPECT_THROW(s.score(TokenSeq{8}, TokenSeq{1}), ValidationError);
  EXPECT_THROW(RewardScorer({.vocab_size = 0, .dim = 2, .hidden = 3}, 1), ConfigError);
}

TEST(RewardScorer, CheckpointRoundTrip) {
  testing::TempDir dir("rm");
  RewardScorer s({.vocab_size = 30, .dim = 5, .hidden = 7}, 9);
  s.save(dir / "r.bin");
  const auto back = RewardScorer::load(dir / "r.bin");
  EXPECT_EQ(back, s);
  EXPECT_DOUBLE_EQ(back.score(TokenSeq{5, 6}, TokenSeq{7}), s.score(TokenSeq{5, 6}, TokenSeq{7}));
}

TEST(RewardScorer, CorruptCheckpointRejected) {
  testing::TempDir dir("rm-bad");
  {
    std::ofstream out(dir / "bad.bin", std::ios::binary);
    out << "NOTARM1-garbage";
  }
  EXPECT_THROW(RewardScorer::load(dir / "bad.bin"), FormatError);
  RewardScorer s({.vocab_size = 30, .dim = 5, .hidden = 7}, 9);
  s.save(dir / "r.bin");
  std::filesystem::resize_file(dir / "r.bin", std::filesystem::file_size(dir / "r.bin") - 8);
  EXPECT_THROW(RewardScorer::load(dir / "r.bin"), FormatError);
}

TEST(Quadruplets, LargestGapFirstWithCap) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<oracle::UtilityRecord> recs;
  for (int q = 0; q < 5; ++q) {
    for (int d = 0; d < 12; ++d) {
      // Quantized values create ties in the gap.
      recs.push_back({"q" + std::to_string(q), "d" + std::to_string(d),
                      std::round(u(rng) * 10.0) / 10.0});
    }
  }
  RewardTrainCfg cfg;
  const auto set = build_quadruplets(recs, cfg);

  std::vector<Quadruplet> expect;
  for (int q = 0; q < 5; ++q) {
    const std::string qid = "q" + std::to_string(q);
    std::vector<Quadruplet> all;
    for (const auto& a : recs) {
      for (const auto& b : recs) {
        if (a.query_id != qid || b.query_id != qid) continue;
        if (a.utility - b.utility > cfg.min_gap) {
          all.push_back({qid, a.doc_id, b.doc_id, a.utility - b.utility});
        }
      }
    }
    std::sort(all.begin(), all.end(), [](const Quadruplet& x, const Quadruplet& y) {
      if (x.u_gap != y.u_gap) return x.u_gap > y.u_gap;
      if (x.doc_i != y.doc_i) return x.doc_i < y.doc_i;
      return x.doc_j < y.doc_j;
    });
    if (all.size() > 32) all.resize(32);
    expect.insert(expect.end(), all.begin(), all.end());
  }
  EXPECT_EQ(set.quads, expect);
  EXPECT_EQ(set.skipped_queries, 0u);
}

TEST(Quadruplets, GapThresholdIsStrict) {
  const std::vector<oracle::UtilityRecord> recs{
      {"q", "a", 0.50}, {"q", "b", 0.48}, {"q", "c", 0.40}, {"r", "x", 0.3}};
  RewardTrainCfg cfg;
  cfg.min_gap = 0.05;
  const auto set = build_quadruplets(recs, cfg);
  ASSERT_EQ(set.quads.size(), 2u);
  EXPECT_EQ(set.quads[0].doc_i, "a");
  EXPECT_EQ(set.quads[0].doc_j, "c");
  EXPECT_EQ(set.quads[1].doc_i, "b");
  EXPECT_EQ(set.skipped_queries, 1u);
}

TEST(Hinge, Values) {
  EXPECT_DOUBLE_EQ(hinge_loss(0.5, 0.0, 0.1), 0.0);
  EXPECT_DOUBLE_EQ(hinge_loss(0.0, 0.0, 0.1), 0.1);
  EXPECT_DOUBLE_EQ(hinge_loss(0.0, 0.5, 0.1), 0.6);
}

data::Dataset small_dataset() {
  return testing::toy_dataset({"alpha beta gamma", "beta delta", "epsilon zeta", "eta theta alpha"},
                              {"what alpha"}, {"gamma"});
}

TEST(RewardObjective, GradientMatchesFiniteDifferences) {
  const auto ds = small_dataset();
  const std::vector<Quadruplet> quads{
      {"q0", "d0", "d1", 0.5}, {"q0", "d0", "d2", 0.4}, {"q0", "d3", "d2", 0.1}};
  RewardScorer s({.vocab_size = ds.tokenizer().size(), .dim = 4, .hidden = 6}, 3);
  std::vector<double> grad(s.num_params());
  const double wd = 1e-2;
  reward_objective(s, ds, quads, 10.0, wd, grad);
  std::vector<double> numeric(s.num_params());
  for (std::size_t i = 0; i < s.num_params(); ++i) {
    const double orig = s.params()[i];
    s.params()[i] = orig + 1e-6;
    const double up = reward_objective(s, ds, quads, 10.0, wd);
    s.params()[i] = orig - 1e-6;
    const double down = reward_objective(s, ds, quads, 10.0, wd);
    s.params()[i] = orig;
    numeric[i] = (up - down) / 2e-6;
  }
  for (std::size_t i = 0; i < grad.size(); ++i) EXPECT_NEAR(grad[i], numeric[i], 1e-6);
}

TEST(RewardTraining, ConvergesOnSingleQuery) {
  const auto ds = small_dataset();
  const std::vector<oracle::UtilityRecord> recs{
      {"q0", "d0", 0.9}, {"q0", "d1", 0.5}, {"q0", "d2", 0.1}, {"q0", "d3", 0.3}};
  RewardTrainCfg cfg;
  cfg.lr = 1e-2;
  cfg.epochs = 200;
  cfg.dim = 8;
  cfg.hidden = 16;
  cfg.weight_decay = 0.0;
  const auto quads = build_quadruplets(recs, cfg).quads;
  ASSERT_EQ(quads.size(), 6u);
  RewardScorer init({.vocab_size = ds.tokenizer().size(), .dim = 8, .hidden = 16}, 1);
  const double before = reward_objective(init, ds, quads, cfg.margin, 0.0);
  const auto result = train_reward(init, ds, quads, cfg);
  const double after = reward_objective(result.scorer, ds, quads, cfg.margin, 0.0);
  EXPECT_LT(after, 0.05 * before);
  EXPECT_EQ(result.epoch_loss.size(), cfg.epochs);
}

TEST(RewardTraining, ZeroGradientLeavesParametersUnchanged) {
  const auto ds = small_dataset();
  // A pair against itself has an identically zero gradient.
  const std::vector<Quadruplet> quads{{"q0", "d0", "d0", 0.5}};
  RewardTrainCfg cfg;
  cfg.weight_decay = 0.0;
  cfg.epochs = 5;
  cfg.dim = 4;
  cfg.hidden = 5;
  RewardScorer init({.vocab_size = ds.tokenizer().size(), .dim = 4, .hidden = 5}, 2);
  const auto result = train_reward(init, ds, quads, cfg);
  EXPECT_EQ(result.scorer, init);
}

TEST(RewardTraining, DeterministicForSeed) {
  const auto ds = small_dataset();
  const std::vector<Quadruplet> quads{{"q0", "d0", "d1", 0.5}, {"q0", "d3", "d2", 0.2}};
  RewardTrainCfg cfg;
  cfg.epochs = 3;
  cfg.dim = 4;
  cfg.hidden = 5;
  cfg.seed = 11;
  EXPECT_EQ(train_reward(ds, quads, cfg).scorer, train_reward(ds, quads, cfg).scorer);
}

TEST(RewardTraining, EmptySetRejected) {
  const auto ds = small_dataset();
  EXPECT_THROW(train_reward(ds, {}, RewardTrainCfg{}), ValidationError);
}

TEST(Adam, ZeroGradientIsNoOp) {
  Adam opt(3, {.lr = 0.1});
  std::vector<double> p{1.0, -2.0, 3.0};
  const std::vector<double> zero(3, 0.0);
  for (int i = 0; i < 10; ++i) opt.step(p, zero);
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0, 3.0}));
}

TEST(Validation, RandomScorerNearChance) {
  std::vector<std::string> texts, questions, answers;
  for (int i = 0; i < 30; ++i) {
    texts.push_back("doc" + std::to_string(i));
    questions.push_back("q" + std::to_string(i));
    answers.push_back("a");
  }
  const auto ds = testing::toy_dataset(texts, questions, answers);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  UtilityTable table;
  std::vector<std::string> ids;
  for (const auto& q : ds.queries()) {
    ids.push_back(q.query_id);
    for (const auto& d : ds.documents()) table[q.query_id][d.doc_id] = u(rng);
  }
  const PairScorer random = [](const data::QaExample& q, const data::Document& d) {
    return static_cast<double>(fnv1a64(q.query_id + "/" + d.doc_id) >> 11);
  };
  const auto v = validate_reward(random, ds, ids, table, 0.02);
  EXPECT_EQ(v.pairwise_queries, 30u);
  EXPECT_NEAR(v.pairwise_accuracy, 0.5, 0.05);

  const PairScorer oracle = [&](const data::QaExample& q, const data::Document& d) {
    return table[q.query_id][d.doc_id];
  };
  const auto perfect = validate_reward(oracle, ds, ids, table, 0.02);
  EXPECT_DOUBLE_EQ(perfect.pairwise_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(perfect.ndcg_at_1, 1.0);
}

TEST(Rewards, FileRoundTrip) {
  testing::TempDir dir("rw");
  const std::vector<RewardRecord> recs{{"q1", "d1", 0.125}, {"q1", "d2", -3.5}};
  write_rewards(dir / "r.jsonl", recs);
  const auto back = read_rewards(dir / "r.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].doc_id, "d2");
  EXPECT_DOUBLE_EQ(back[1].reward, -3.5);
}

}  // namespace
}  // namespace uae::reward
