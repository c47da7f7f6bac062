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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uae/eval/generation.hpp"
#include "uae/eval/latency.hpp"
#include "uae/eval/metrics.hpp"
#include "uae/ranking.hpp"

namespace uae::eval {

/// query_id -> every pool document with the method's score.
using ScoredRun = std::map<std::string, std::vector<ScoredDoc>>;

/// Ranks each query's documents (descending score, ascending doc_id).
RunRanking to_ranking(const ScoredRun& scored);

struct MethodMetrics {
  std::string name;
  std::map<std::size_t, double> recall;  // k -> R@k
  double map = 0.0;
  double exp_util_at_1 = 0.0;
  std::optional<double> ndcg_at_1;
  std::optional<double> pairwise_accuracy;
  std::optional<double> gen_f1;
  std::optional<double> rouge_l;
  std::vector<std::string> flagged;
  /// metric name -> query_id -> value
  std::map<std::string, std::map<std::string, double>> per_query;
};

struct EvalOptions {
  std::vector<std::size_t> k_list{1, 3};
  double min_gap = 0.02;  // pairwise accuracy
};

/// Rank metrics, ExpUtil@1 and the reward-fidelity metrics (NDCG@1, pairwise
/// accuracy over pool utilities) for one scored run.
MethodMetrics evaluate_method(const std::string& name, const ScoredRun& scored,
                              const Judgments& judgments, const EvalOptions& opts);

void attach_generation(MethodMetrics& m, const GenerationResult& g);

struct EvalReport {
  std::uint64_t seed = 0;
  std::size_t queries = 0;
  std::string relevance = "gold";  // or "threshold"
  double threshold = 0.1;
  std::vector<MethodMetrics> methods;
  std::optional<LatencyReport> latency;
  /// method name -> latency path name ("index" or "rerank")
  std::map<std::string, std::string> latency_path;

  const MethodMetrics& method(const std::string& name) const;
};

/// report.json. Every timing lives under the top-level "latency" key.
std::string report_json(const EvalReport& r, bool per_query = true);
void write_report_json(const std::filesystem::path& path, const EvalReport& r);

/// report.csv: one row per method; latency columns filled for the methods
/// mapped to a benchmarked path.
void write_report_csv(const std::filesystem::path& path, const EvalReport& r);

/// efficiency_scatter.csv: method, metric (R@1), latency_ms (median).
void write_efficiency_csv(const std::filesystem::path& path, const EvalReport& r);

void write_run(const std::filesystem::path& path, const RunRanking& run);
RunRanking read_run(const std::filesystem::path& path);

}  // namespace uae::eval
