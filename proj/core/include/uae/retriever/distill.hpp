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
#include <span>
#include <string>
#include <vector>

#include "uae/data/dataset.hpp"
#include "uae/retriever/bi_encoder.hpp"
#include "uae/reward/training.hpp"

namespace uae::retriever {

inline constexpr double kProbFloor = 1e-12;

/// softmax(lambda * r), where r is z-scored within the set when
/// `standardize` is on (all zeros if its standard deviation is 0).
std::vector<double> target_distribution(std::span<const double> rewards, double lambda,
                                        bool standardize);

/// softmax(<q, d_i> / tau) with max subtraction.
std::vector<double> student_distribution(std::span<const double> q,
                                         std::span<const std::vector<double>> docs,
                                         double tau);

/// softmax(logits) with max subtraction.
std::vector<double> softmax(std::span<const double> logits);

/// -sum target_i * log(max(student_i, 1e-12)).
double uae_loss(std::span<const double> target, std::span<const double> student);

double entropy(std::span<const double> p);

/// KL(target || student) with the same floor as uae_loss.
double kl_divergence(std::span<const double> target, std::span<const double> student);

/// One optimization step's worth of queries. Each distinct document appears
/// once in `docs` and is encoded once.
struct DistillBatch {
  std::vector<std::span<const TokenId>> queries;
  std::vector<std::span<const TokenId>> docs;
  std::vector<std::vector<std::size_t>> candidates;  // per query, indices into docs
  std::vector<std::vector<double>> targets;          // per query, aligned with candidates
};

struct DistillStats {
  double mean_loss = 0.0;
  double mean_kl = 0.0;
};

/// Mean uae_loss over the batch plus (weight_decay / 2) * ||params||^2. The
/// gradient (overwritten when `grad` is non-empty) flows through the softmax,
/// the normalization, the projection and the pooled embeddings.
double distill_objective(const BiEncoder& enc, const DistillBatch& batch, double tau,
                         double weight_decay, std::span<double> grad = {},
                         DistillStats* stats = nullptr);

enum class TargetKind { Uae, OneHot };

struct DistillCfg {
  double lambda = 5.0;
  double tau = 0.05;
  bool standardize = true;
  double lr = 1e-3;
  double weight_decay = 1e-5;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
  bool cross_query = false;  // other queries' candidates join as zero-target negatives
  std::size_t dim = 64;
  TargetKind target = TargetKind::Uae;  // OneHot: InfoNCE on the first candidate
};

/// A training query with its candidate set (first entry is the positive)
/// and one reward per candidate.
struct DistillExample {
  std::string query_id;
  std::vector<std::string> doc_ids;
  std::vector<double> rewards;
};

struct TraceRow {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double mean_kl = 0.0;
};

struct DistillResult {
  BiEncoder encoder;
  std::vector<TraceRow> trace;
};

/// The target distribution for one example under `cfg`.
std::vector<double> example_target(const DistillExample& ex, const DistillCfg& cfg);

DistillResult train_distill(const data::Dataset& ds, std::span<const DistillExample> examples,
                            const DistillCfg& cfg);
DistillResult train_distill(BiEncoder init, const data::Dataset& ds,
                            std::span<const DistillExample> examples, const DistillCfg& cfg);

/// Candidate sets [gold, negatives...] scored by `reward`.
DistillExample make_example(const data::Dataset& ds, const std::string& query_id,
                            const std::vector<std::string>& negatives,
                            const reward::PairScorer& reward);

/// m documents drawn uniformly from the corpus, excluding the query's gold.
std::vector<std::string> random_negatives(const data::Dataset& ds, const data::QaExample& q,
                                          std::size_t m, std::uint64_t seed);

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> trace);

}  // namespace uae::retriever
