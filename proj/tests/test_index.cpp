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

#include <cmath>
#include <fstream>
#include <random>

#include "test_util.hpp"
#include "uae/index/vector_index.hpp"

namespace uae::index {
namespace {

using Rows = std::vector<std::pair<std::string, std::vector<double>>>;

std::vector<double> unit_gaussian(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g;
  std::vector<double> v(dim);
  double n = 0.0;
  for (auto& x : v) {
    x = g(rng);
    n += x * x;
  }
  for (auto& x : v) x /= std::sqrt(n);
  return v;
}

Rows random_rows(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Rows rows;
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "d%06zu", i);
    rows.emplace_back(id, unit_gaussian(rng, dim));
  }
  return rows;
}

TEST(VectorIndex, HandVectors) {
  const double s = std::sqrt(0.5);
  const Rows rows{{"a", {1.0, 0.0}}, {"b", {0.0, 1.0}}, {"c", {s, s}}};
  const auto idx = VectorIndex::build(rows);
  const auto top = idx.search(std::vector<double>{1.0, 0.0}, 3);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].doc_id, "a");
  EXPECT_EQ(top[1].doc_id, "c");
  EXPECT_EQ(top[2].doc_id, "b");
  EXPECT_NEAR(top[1].score, s, 1e-7);
  EXPECT_EQ(idx.search(std::vector<double>{1.0, 0.0}, 10).size(), 3u);
}

TEST(VectorIndex, TiesByDocId) {
  const Rows rows{{"z", {1.0, 0.0}}, {"m", {1.0, 0.0}}, {"a", {0.0, 1.0}}};
  const auto top = VectorIndex::build(rows).search(std::vector<double>{1.0, 0.0}, 2);
  EXPECT_EQ(top[0].doc_id, "m");
  EXPECT_EQ(top[1].doc_id, "z");
}

TEST(VectorIndex, ValidatesInput) {
  EXPECT_THROW(VectorIndex::build(Rows{}), ValidationError);
  EXPECT_THROW(VectorIndex::build(Rows{{"a", {1.0, 0.0}}, {"b", {1.0}}}), ValidationError);
  EXPECT_THROW(VectorIndex::build(Rows{{"a", {2.0, 0.0}}}), ValidationError);
  EXPECT_THROW(VectorIndex::build(Rows{{"a", {1.0, 0.0}}, {"a", {0.0, 1.0}}}), ValidationError);
}

TEST(VectorIndex, ExactMatchesBruteForce) {
  const auto rows = random_rows(500, 16, 1);
  const auto idx = VectorIndex::build(rows);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto q = unit_gaussian(rng, 16);
    std::vector<ScoredDoc> brute;
    for (std::size_t i = 0; i < rows.size(); ++i) brute.push_back({rows[i].first, idx.score(i, q)});
    top_k(brute, 10);
    EXPECT_EQ(idx.search(q, 10), brute);
  }
}

TEST(Hnsw, RecallAndStructure) {
  const auto rows = random_rows(3000, 32, 3);
  const auto vecs = VectorIndex::build(rows);
  const auto g = HnswGraph::build(vecs, {});
  EXPECT_EQ(g.size(), rows.size());
  EXPECT_EQ(g.reachable_count(), rows.size());
  EXPECT_TRUE(g.layer0_symmetric());
  std::mt19937_64 rng(4);
  double total = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto q = unit_gaussian(rng, 32);
    total += overlap_recall(g.search(vecs, q, 10), vecs.search(q, 10));
  }
  EXPECT_GE(total / 100.0, 0.95);
}

TEST(Hnsw, DegreeBounds) {
  const auto vecs = VectorIndex::build(random_rows(1000, 8, 5));
  HnswParams p;
  p.M = 6;
  const auto g = HnswGraph::build(vecs, p);
  for (std::uint32_t n = 0; n < g.size(); ++n) {
    for (std::size_t l = 1; l <= g.level(n); ++l) EXPECT_LE(g.neighbors(n, l).size(), p.M);
  }
}

TEST(Hnsw, DeterministicBuild) {
  const auto vecs = VectorIndex::build(random_rows(800, 8, 6));
  EXPECT_EQ(HnswGraph::build(vecs, {}), HnswGraph::build(vecs, {}));
}

TEST(Index, SaveLoadRoundTrip) {
  testing::TempDir dir("idx");
  Index idx;
  idx.vectors = VectorIndex::build(random_rows(300, 8, 7));
  idx.hnsw = HnswGraph::build(idx.vectors, {});
  idx.save(dir / "i.bin");
  const auto back = Index::load(dir / "i.bin");
  EXPECT_EQ(back, idx);
  std::mt19937_64 rng(8);
  const auto q = unit_gaussian(rng, 8);
  EXPECT_EQ(back.search(q, 5), idx.search(q, 5));
  EXPECT_EQ(back.serialize(), idx.serialize());

  Index exact_only;
  exact_only.vectors = idx.vectors;
  EXPECT_EQ(Index::deserialize(exact_only.serialize()), exact_only);
  EXPECT_EQ(exact_only.search(q, 5), exact_only.search_exact(q, 5));
}

TEST(Index, ByteIdenticalAcrossBuilds) {
  auto make = [] {
    Index idx;
    idx.vectors = VectorIndex::build(random_rows(400, 8, 9));
    idx.hnsw = HnswGraph::build(idx.vectors, {});
    return idx.serialize();
  };
  EXPECT_EQ(make(), make());
}

TEST(Index, CorruptFilesRejected) {
  Index idx;
  idx.vectors = VectorIndex::build(random_rows(50, 4, 10));
  idx.hnsw = HnswGraph::build(idx.vectors, {});
  const auto bytes = idx.serialize();
  EXPECT_THROW(Index::deserialize("UAEIDX9" + bytes.substr(7)), FormatError);
  EXPECT_THROW(Index::deserialize(bytes.substr(0, bytes.size() / 2)), FormatError);
  EXPECT_THROW(Index::deserialize(bytes + "x"), FormatError);
  testing::TempDir dir("idx-bad");
  EXPECT_THROW(Index::load(dir / "absent.bin"), MissingInputError);
}

TEST(Index, SearchValidation) {
  Index idx;
  idx.vectors = VectorIndex::build(random_rows(10, 4, 11));
  EXPECT_THROW(idx.search(std::vector<double>{1.0, 0.0}, 3), ValidationError);
  EXPECT_THROW(idx.search(std::vector<double>{1.0, 0.0, 0.0, 0.0}, 0), ValidationError);
  EXPECT_THROW(Index{}.search(std::vector<double>{1.0}, 1), ValidationError);
}

TEST(OverlapRecall, Values) {
  const std::vector<ScoredDoc> exact{{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}};
  const std::vector<ScoredDoc> approx{{"a", 1}, {"c", 1}, {"x", 1}, {"y", 1}};
  EXPECT_DOUBLE_EQ(overlap_recall(approx, exact), 0.5);
  EXPECT_DOUBLE_EQ(overlap_recall(exact, exact), 1.0);
}

}  // namespace
}  // namespace uae::index
