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
#include <cmath>

#include "test_util.hpp"
#include "uae/app/synth.hpp"
#include "uae/data/tokenizer.hpp"
#include "uae/oracle/generator.hpp"
#include "uae/oracle/ngram_lm.hpp"
#include "uae/oracle/scoring.hpp"

namespace uae::oracle {
namespace {

using data::kBos;
using data::kEos;
using data::kSep;

TEST(NgramLm, UnigramAddOne) {
  // "a a b" with a = 5, b = 6 and seven ids: (2 + 1) / (3 + 7).
  const std::vector<TokenSeq> corpus{{5, 5, 6}};
  const auto lm = NgramLm::train(corpus, 1, 1.0, 7);
  EXPECT_NEAR(lm.prob(TokenSeq{}, 5), 0.3, 1e-12);
  EXPECT_NEAR(lm.prob(TokenSeq{}, 6), 0.2, 1e-12);
  EXPECT_NEAR(lm.prob(TokenSeq{}, 0), 0.1, 1e-12);
}

TEST(NgramLm, DistributionsSumToOne) {
  const std::vector<TokenSeq> corpus{{5, 6, 7, 5, 6}, {7, 7, 8}};
  const auto lm = NgramLm::train(corpus, 3, 0.5, 10);
  for (const TokenSeq& h : {TokenSeq{}, TokenSeq{5}, TokenSeq{5, 6}, TokenSeq{9, 9}}) {
    double total = 0.0;
    for (TokenId x = 0; x < 10; ++x) total += lm.prob(h, x);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(NgramLm, UnseenContextIsUniform) {
  const std::vector<TokenSeq> corpus{{5, 6}};
  const auto lm = NgramLm::train(corpus, 2, 0.1, 10);
  EXPECT_EQ(lm.find(TokenSeq{9}), nullptr);
  EXPECT_NEAR(lm.prob(TokenSeq{9}, 5), 0.1, 1e-12);
}

Generator toy_generator() {
  const std::vector<TokenSeq> corpus{{7, 8, 9}, {kSep, 8, 9, kEos}, {5, 7, 8}};
  return Generator::train(corpus, 12, {.order = 2, .add_k = 0.1, .copy_weight = 0.7,
                                       .copy_context_weight = 0.5});
}

const TokenSeq kQ{5, 6};
const TokenSeq kD{7, 8, 9, 10};

TEST(Generator, UtilityMatchesReference) {
  const auto gen = toy_generator();
  EXPECT_NEAR(gen.utility(kQ, kD, TokenSeq{8, 9}), 0.4643824304026442, 1e-12);
  EXPECT_NEAR(gen.utility(kQ, kD, TokenSeq{10}), 0.18863636363636366, 1e-12);
  const std::vector<TokenSeq> answers{{8, 9}, {10}};
  EXPECT_NEAR(gen.expected_utility(kQ, kD, answers), 0.32650939701950393, 1e-12);
}

TEST(Generator, GreedyMatchesReference) {
  const auto gen = toy_generator();
  EXPECT_EQ(gen.greedy_decode(kQ, kD, 3), (TokenSeq{8, 9, 10}));
  EXPECT_THROW(gen.greedy_decode(kQ, kD, 0), ConfigError);
}

TEST(Generator, NextDistributionNormalized) {
  const auto gen = toy_generator();
  for (const TokenSeq& h : {Generator::prompt(kQ, kD), TokenSeq{kBos}, TokenSeq{kBos, 5, kSep}}) {
    const auto dist = gen.next_distribution(h);
    ASSERT_EQ(dist.size(), 12u);
    double total = 0.0;
    for (std::size_t x = 0; x < dist.size(); ++x) {
      EXPECT_GE(dist[x], 0.0);
      EXPECT_NEAR(dist[x], gen.next_prob(h, static_cast<TokenId>(x)), 1e-15);
      total += dist[x];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Generator, ZeroCopyWeightIsNgram) {
  const std::vector<TokenSeq> corpus{{7, 8, 9}, {5, 7, 8}};
  const auto gen = Generator::train(corpus, 12, {.order = 2, .add_k = 0.1, .copy_weight = 0.0});
  const auto h = Generator::prompt(kQ, kD);
  for (TokenId x = 0; x < 12; ++x) EXPECT_DOUBLE_EQ(gen.next_prob(h, x), gen.lm().prob(h, x));
}

TEST(Generator, PromptLayout) {
  EXPECT_EQ(Generator::prompt(kQ, kD), (TokenSeq{kBos, 5, 6, kSep, 7, 8, 9, 10, kSep}));
}

TEST(Generator, UtilityIsGeometricMean) {
  const auto gen = toy_generator();
  const TokenSeq a{8, 9, 10};
  const auto probs = gen.answer_token_probs(kQ, kD, a);
  ASSERT_EQ(probs.size(), 3u);
  double lp = 0.0;
  for (double p : probs) {
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
    lp += std::log(p);
  }
  EXPECT_NEAR(gen.utility(kQ, kD, a), std::exp(lp / 3.0), 1e-12);
  EXPECT_NEAR(utility_from_probs(probs), std::exp(lp / 3.0), 1e-12);
  EXPECT_THROW(gen.utility(kQ, kD, TokenSeq{}), ValidationError);
}

TEST(Generator, CopyingRaisesUtilityOfPresentAnswer) {
  const auto gen = toy_generator();
  const TokenSeq with{7, 8, 10, 11};
  const TokenSeq without{7, 8, 9};
  EXPECT_GT(gen.utility(kQ, with, TokenSeq{11}), gen.utility(kQ, without, TokenSeq{11}));
}

TEST(Noise, ZeroSigmaIsIdentity) {
  EXPECT_DOUBLE_EQ(apply_noise(0.37, {.sigma = 0.0, .seed = 1}, "q", "d"), 0.37);
}

TEST(Noise, KeyedAndClamped) {
  const NoiseConfig n{.sigma = 0.3, .seed = 42};
  EXPECT_DOUBLE_EQ(apply_noise(0.5, n, "q1", "d1"), apply_noise(0.5, n, "q1", "d1"));
  EXPECT_NE(apply_noise(0.5, n, "q1", "d1"), apply_noise(0.5, n, "q1", "d2"));
  EXPECT_NE(apply_noise(0.5, n, "q1", "d1"), apply_noise(0.5, {.sigma = 0.3, .seed = 43}, "q1", "d1"));
  for (int i = 0; i < 200; ++i) {
    const double u = apply_noise(0.99, {.sigma = 2.0, .seed = 7}, "q", std::to_string(i));
    EXPECT_GT(u, 0.0);
    EXPECT_LE(u, 1.0);
  }
}

TEST(Histogram, BinsCoverAllValues) {
  const std::vector<double> values{0.0, 0.1, 0.25, 0.5, 0.75, 1.0};
  const auto bins = histogram(values, 4);
  ASSERT_EQ(bins.size(), 4u);
  std::size_t total = 0;
  for (const auto& b : bins) total += b.count;
  EXPECT_EQ(total, values.size());
  EXPECT_DOUBLE_EQ(bins.front().lo, 0.0);
  EXPECT_DOUBLE_EQ(bins.back().hi, 1.0);
  EXPECT_EQ(bins[0].count, 2u);
  EXPECT_EQ(bins[3].count, 2u);
}

TEST(Scoring, UtilitiesRoundTrip) {
  testing::TempDir dir("util");
  const std::vector<UtilityRecord> recs{{"q1", "d1", 0.25}, {"q1", "d2", 1.0 / 3.0}};
  write_utilities(dir / "u.jsonl", recs);
  EXPECT_EQ(read_utilities(dir / "u.jsonl"), recs);
}

class SynthOracle : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    app::SynthSpec spec;
    spec.num_docs = 400;
    spec.num_queries = 60;
    spec.pool_size = 20;
    spec.seed = 3;
    auto s = app::generate_synthetic(spec);
    data::LoadOptions opts;
    opts.pool_size = spec.pool_size;
    ds_ = new data::Dataset(
        data::Dataset::build(std::move(s.corpus), std::move(s.queries), std::move(s.pools), opts));
    std::vector<std::string> ids;
    for (const auto& q : ds_->queries()) ids.push_back(q.query_id);
    const auto corpus = oracle_training_corpus(*ds_, ids);
    gen_ = new Generator(Generator::train(corpus, ds_->tokenizer().size(), OracleConfig{}));
  }
  static void TearDownTestSuite() {
    delete gen_;
    delete ds_;
  }
  static data::Dataset* ds_;
  static Generator* gen_;
};
data::Dataset* SynthOracle::ds_ = nullptr;
Generator* SynthOracle::gen_ = nullptr;

TEST_F(SynthOracle, GoldAbovePoolMedian) {
  const auto recs = score_pools(*gen_, *ds_);
  std::size_t above = 0;
  for (const auto& q : ds_->queries()) {
    std::vector<double> us;
    double gold = 0.0;
    for (const auto& r : recs) {
      if (r.query_id != q.query_id) continue;
      us.push_back(r.utility);
      if (r.doc_id == q.gold_doc_ids.front()) gold = r.utility;
    }
    ASSERT_EQ(us.size(), ds_->pool_size());
    std::nth_element(us.begin(), us.begin() + us.size() / 2, us.end());
    if (gold > us[us.size() / 2]) ++above;
  }
  EXPECT_EQ(above, ds_->queries().size());
}

TEST_F(SynthOracle, ScoringIsDeterministicAndBounded) {
  const NoiseConfig noise{.sigma = 0.1, .seed = 5};
  const auto a = score_pools(*gen_, *ds_, noise);
  const auto b = score_pools(*gen_, *ds_, noise);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), ds_->queries().size() * ds_->pool_size());
  for (const auto& r : a) {
    EXPECT_GT(r.utility, 0.0);
    EXPECT_LE(r.utility, 1.0);
  }
}

}  // namespace
}  // namespace uae::oracle
