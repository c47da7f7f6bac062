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

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "uae/data/dataset.hpp"
#include "uae/index/vector_index.hpp"
#include "uae/miner/bm25.hpp"
#include "uae/retriever/bi_encoder.hpp"
#include "uae/reward/reward_model.hpp"

namespace {

using namespace uae;

std::vector<double> unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n;
  std::vector<double> v(dim);
  double s = 0.0;
  for (auto& x : v) {
    x = n(rng);
    s += x * x;
  }
  for (auto& x : v) x /= std::sqrt(s);
  return v;
}

TokenSeq random_tokens(std::mt19937_64& rng, std::size_t vocab, std::size_t len) {
  TokenSeq s(len);
  for (auto& t : s) t = static_cast<TokenId>(5 + rng() % (vocab - 5));
  return s;
}

void BM_Bm25Topk(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<data::Document> docs;
  for (int i = 0; i < state.range(0); ++i) {
    docs.push_back({"d" + std::to_string(i), "", random_tokens(rng, 2000, 20)});
  }
  const auto index = miner::Bm25Index::build(docs);
  const auto q = random_tokens(rng, 2000, 6);
  for (auto _ : state) benchmark::DoNotOptimize(index.topk(q, 20));
}
BENCHMARK(BM_Bm25Topk)->Arg(2000)->Arg(10000);

index::Index make_index(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(2);
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (std::size_t i = 0; i < n; ++i) rows.emplace_back("d" + std::to_string(i), unit(rng, dim));
  index::Index idx;
  idx.vectors = index::VectorIndex::build(rows);
  idx.hnsw = index::HnswGraph::build(idx.vectors, {});
  return idx;
}

void BM_HnswSearch(benchmark::State& state) {
  static const auto idx = make_index(10000, 64);
  std::mt19937_64 rng(3);
  const auto q = unit(rng, 64);
  for (auto _ : state) benchmark::DoNotOptimize(idx.search(q, 10));
}
BENCHMARK(BM_HnswSearch);

void BM_ExactSearch(benchmark::State& state) {
  static const auto idx = make_index(10000, 64);
  std::mt19937_64 rng(3);
  const auto q = unit(rng, 64);
  for (auto _ : state) benchmark::DoNotOptimize(idx.search_exact(q, 10));
}
BENCHMARK(BM_ExactSearch);

void BM_EncoderEncode(benchmark::State& state) {
  retriever::BiEncoder enc(5000, 64, 4);
  std::mt19937_64 rng(4);
  const auto toks = random_tokens(rng, 5000, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enc.encode(toks));
}
BENCHMARK(BM_EncoderEncode)->Arg(8)->Arg(32);

void BM_RewardScore(benchmark::State& state) {
  reward::RewardScorer scorer({.vocab_size = 5000, .dim = 64, .hidden = 512}, 5);
  std::mt19937_64 rng(5);
  const auto q = random_tokens(rng, 5000, 8);
  const auto d = random_tokens(rng, 5000, 24);
  for (auto _ : state) benchmark::DoNotOptimize(scorer.score(q, d));
}
BENCHMARK(BM_RewardScore);

}  // namespace

BENCHMARK_MAIN();
