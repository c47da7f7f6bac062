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
#include <optional>
#include <string>
#include <vector>

#include "uae/app/config.hpp"
#include "uae/data/dataset.hpp"
#include "uae/eval/report.hpp"
#include "uae/oracle/generator.hpp"
#include "uae/ranking.hpp"

namespace uae::app {

/// manifest.json, written by ingest and checked by every later stage.
struct Manifest {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  std::string corpus;
  std::string queries;
  std::string pools;
  std::size_t num_docs = 0;
  std::size_t num_queries = 0;
  std::size_t pool_size = 0;
  std::size_t vocab_size = 0;
  double test_fraction = 0.0;
  std::vector<std::string> train_query_ids;
  std::vector<std::string> test_query_ids;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

void write_manifest(const std::filesystem::path& path, const Manifest& m);
/// Throws MissingInputError when absent and FormatError on an unsupported
/// schema_version.
Manifest read_manifest(const std::filesystem::path& path);

/// Seeded train/test split; round(test_fraction * Q) test queries, at least
/// one of each when Q >= 2. Both lists come back sorted.
std::pair<std::vector<std::string>, std::vector<std::string>> split_queries(
    const data::Dataset& ds, double test_fraction, std::uint64_t seed);

/// The oracle for a manifest: background model over every document plus the
/// training queries' answers.
oracle::Generator train_oracle(const data::Dataset& ds, const Manifest& m,
                               const PipelineConfig& cfg);

/// Stages. Each reads its inputs from the configured paths, checks that they
/// exist (MissingInputError names the first absent file) and writes its
/// outputs under paths.artifacts_dir (synth writes into paths.data_dir).
void run_synth(const PipelineConfig& cfg);
Manifest run_ingest(const PipelineConfig& cfg);
std::vector<oracle::UtilityRecord> run_score_utility(const PipelineConfig& cfg);
reward::RewardValidation run_train_reward(const PipelineConfig& cfg);
miner::MiningReport run_mine(const PipelineConfig& cfg);
void run_train_retriever(const PipelineConfig& cfg);
void run_build_index(const PipelineConfig& cfg);
/// Full-corpus retrieval of every test query through the index; writes run.jsonl.
eval::RunRanking run_retrieve(const PipelineConfig& cfg, std::size_t k);
eval::EvalReport run_evaluate(const PipelineConfig& cfg);
eval::LatencyReport run_bench(const PipelineConfig& cfg);

/// synth (when the data files are missing or `force_synth`) through evaluate.
eval::EvalReport run_all(const PipelineConfig& cfg, bool force_synth = true);

/// report.json with the "latency" key removed; the deterministic part.
std::string report_without_latency(const std::filesystem::path& report_json);

}  // namespace uae::app
