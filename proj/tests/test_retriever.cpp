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
#include <fstream>
#include <numeric>
#include <random>

#include "test_util.hpp"
#include "uae/retriever/bi_encoder.hpp"
#include "uae/retriever/distill.hpp"

namespace uae::retriever {
namespace {

std::vector<double> random_rewards(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<double> r(n);
  for (auto& x : r) x = g(rng);
  return r;
}

TEST(Softmax, ReferenceValues) {
  const auto p = target_distribution(std::vector<double>{1.0, 0.0}, 1.0, false);
  EXPECT_NEAR(p[0], 0.7310585786300049, 1e-12);
  EXPECT_NEAR(p[1], 0.2689414213699951, 1e-12);
  const std::vector<std::vector<double>> docs{{1.0}, {-1.0}};
  const auto s = student_distribution(std::vector<double>{1.0}, docs, 1.0);
  EXPECT_NEAR(s[0], 0.8807970779778823, 1e-12);
  EXPECT_NEAR(s[1], 0.11920292202211755, 1e-12);
  EXPECT_NEAR(uae_loss(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}),
              0.6931471805599453, 1e-12);
}

TEST(Softmax, StableForLargeLogits) {
  const auto p = softmax(std::vector<double>{1000.0, 999.0, -1000.0});
  EXPECT_NEAR(p[0], 0.7310585786300049, 1e-12);
  EXPECT_TRUE(std::isfinite(p[2]));
}

TEST(TargetDistribution, Invariants) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = random_rewards(rng, 2 + trial % 9);
    const auto p = target_distribution(r, 5.0, true);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (std::size_t i = 0; i < r.size(); ++i) {
      EXPECT_GT(p[i], 0.0);
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (r[i] > r[j]) {
          EXPECT_GT(p[i], p[j]);
        }
      }
    }
    // Entropy falls as lambda grows.
    double prev = std::log(static_cast<double>(r.size())) + 1e-12;
    for (double lambda : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      const double h = entropy(target_distribution(r, lambda, true));
      EXPECT_LT(h, prev);
      prev = h;
    }
    // z-scoring removes affine shifts of the rewards.
    std::vector<double> shifted(r);
    for (auto& x : shifted) x = 3.0 * x - 7.0;
    const auto q = target_distribution(shifted, 5.0, true);
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-12);
  }
}

TEST(TargetDistribution, ConstantRewardsAreUniform) {
  const auto p = target_distribution(std::vector<double>{0.4, 0.4, 0.4, 0.4}, 5.0, true);
  for (double x : p) EXPECT_DOUBLE_EQ(x, 0.25);
}

TEST(Divergence, Properties) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = softmax(random_rewards(rng, 6));
    const auto b = softmax(random_rewards(rng, 6));
    EXPECT_GE(kl_divergence(a, b), 0.0);
    EXPECT_NEAR(kl_divergence(a, a), 0.0, 1e-12);
    EXPECT_NEAR(uae_loss(a, b), entropy(a) + kl_divergence(a, b), 1e-9);
    EXPECT_GE(uae_loss(a, b) + 1e-12, entropy(a));
  }
}

TEST(BiEncoder, UnitNormAndErrors) {
  BiEncoder enc(20, 8, 3);
  const auto y = enc.encode(TokenSeq{5, 6, 7});
  EXPECT_NEAR(dot(y, y), 1.0, 1e-12);
  EXPECT_THROW(enc.encode(TokenSeq{}), ValidationError);
  EXPECT_THROW(enc.encode(TokenSeq{20}), ValidationError);
}

TEST(BiEncoder, SaveLoadWithVocab) {
  testing::TempDir dir("enc");
  BiEncoder enc(6, 4, 5);
  const auto tok = data::Tokenizer::from_vocab({"<pad>", "<unk>", "<sep>", "<bos>", "<eos>", "w"});
  enc.save(dir / "a.bin");
  enc.save(dir / "b.bin", &tok);
  const auto a = BiEncoder::load(dir / "a.bin");
  const auto b = BiEncoder::load(dir / "b.bin");
  EXPECT_EQ(a.encoder, enc);
  EXPECT_FALSE(a.tokenizer.has_value());
  EXPECT_EQ(b.encoder, enc);
  ASSERT_TRUE(b.tokenizer.has_value());
  EXPECT_EQ(*b.tokenizer, tok);

  std::ofstream(dir / "bad.bin", std::ios::binary) << "UAERM1 not an encoder";
  EXPECT_THROW(BiEncoder::load(dir / "bad.bin"), FormatError);
  EXPECT_THROW(BiEncoder::load(dir / "missing.bin"), MissingInputError);
}

TEST(DistillObjective, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<TokenId> tok(0, 14);
  for (int config = 0; config < 100; ++config) {
    BiEncoder enc(15, 3 + config % 4, rng());
    std::vector<TokenSeq> qs(2), ds(5);
    for (auto* group : {&qs, &ds}) {
      for (auto& s : *group) {
        s.resize(1 + rng() % 4);
        for (auto& t : s) t = tok(rng);
      }
    }
    DistillBatch batch;
    for (const auto& q : qs) batch.queries.emplace_back(q);
    for (const auto& d : ds) batch.docs.emplace_back(d);
    batch.candidates = {{0, 1, 2}, {3, 4, 0}};
    for (std::size_t i = 0; i < 2; ++i) {
      batch.targets.push_back(target_distribution(random_rewards(rng, 3), 5.0, true));
    }
    const double tau = 0.2 + 0.1 * (config % 5);
    const double wd = config % 2 ? 1e-3 : 0.0;
    std::vector<double> grad(enc.num_params());
    distill_objective(enc, batch, tau, wd, grad);
    for (std::size_t i = 0; i < enc.num_params(); ++i) {
      const double orig = enc.params()[i];
      enc.params()[i] = orig + 1e-6;
      const double up = distill_objective(enc, batch, tau, wd);
      enc.params()[i] = orig - 1e-6;
      const double down = distill_objective(enc, batch, tau, wd);
      enc.params()[i] = orig;
      const double numeric = (up - down) / 2e-6;
      ASSERT_LT(std::abs(grad[i] - numeric), 1e-5 * std::max(1.0, std::abs(numeric)))
          << "config " << config << " param " << i;
    }
  }
}

data::Dataset distill_dataset() {
  return testing::toy_dataset({"alpha beta", "beta gamma", "gamma delta", "delta epsilon",
                               "epsilon zeta", "zeta eta", "eta theta", "theta alpha"},
                              {"alpha question"}, {"x"});
}

TEST(Distill, KlConvergesOnSingleQuery) {
  const auto ds = distill_dataset();
  const DistillExample ex{"q0",
                          {"d0", "d1", "d2", "d3", "d4", "d5", "d6", "d7"},
                          {1.0, 0.6, 0.5, 0.2, 0.1, 0.0, -0.3, -0.5}};
  DistillCfg cfg;
  cfg.lr = 1e-2;
  cfg.epochs = 300;
  cfg.batch_size = 1;
  cfg.dim = 16;
  const auto res = train_distill(ds, std::span(&ex, 1), cfg);
  ASSERT_EQ(res.trace.size(), 300u);
  EXPECT_LT(res.trace.back().mean_kl, 0.01);
  EXPECT_LT(res.trace.back().mean_loss, res.trace.front().mean_loss);
}

TEST(Distill, OneHotTargetIsInfoNce) {
  const DistillExample ex{"q0", {"d0", "d1", "d2"}, {0.1, 0.9, 0.5}};
  DistillCfg cfg;
  cfg.target = TargetKind::OneHot;
  EXPECT_EQ(example_target(ex, cfg), (std::vector<double>{1.0, 0.0, 0.0}));
  cfg.target = TargetKind::Uae;
  const auto t = example_target(ex, cfg);
  EXPECT_GT(t[1], t[2]);
  EXPECT_GT(t[2], t[0]);
}

TEST(Distill, DeterministicForSeed) {
  const auto ds = distill_dataset();
  const DistillExample ex{"q0", {"d0", "d1", "d2"}, {1.0, 0.5, 0.0}};
  DistillCfg cfg;
  cfg.epochs = 3;
  cfg.dim = 4;
  cfg.seed = 9;
  cfg.cross_query = true;
  EXPECT_EQ(train_distill(ds, std::span(&ex, 1), cfg).encoder,
            train_distill(ds, std::span(&ex, 1), cfg).encoder);
}

TEST(RandomNegatives, ExcludeGoldAndRepeatable) {
  const auto ds = distill_dataset();
  const auto& q = ds.queries().front();
  const auto a = random_negatives(ds, q, 5, 4);
  EXPECT_EQ(a, random_negatives(ds, q, 5, 4));
  ASSERT_EQ(a.size(), 5u);
  std::set<std::string> uniq(a.begin(), a.end());
  EXPECT_EQ(uniq.size(), 5u);
  EXPECT_FALSE(uniq.contains("d0"));
}

}  // namespace
}  // namespace uae::retriever
