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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uae/app/synth.hpp"
#include "uae/index/vector_index.hpp"
#include "uae/miner/mining.hpp"
#include "uae/oracle/generator.hpp"
#include "uae/retriever/distill.hpp"
#include "uae/reward/training.hpp"

namespace uae::app {

inline constexpr int kSchemaVersion = 1;

struct PathsCfg {
  std::filesystem::path data_dir = "data";
  std::filesystem::path artifacts_dir = "artifacts";
  // Empty means <data_dir>/corpus.jsonl etc.
  std::filesystem::path corpus;
  std::filesystem::path queries;
  std::filesystem::path pools;

  std::filesystem::path corpus_path() const;
  std::filesystem::path queries_path() const;
  std::filesystem::path pools_path() const;
  std::filesystem::path artifact(std::string_view name) const;
};

struct DataCfg {
  std::size_t pool_size = 50;
  std::size_t min_freq = 1;
  double test_fraction = 0.2;
};

struct OracleCfg {
  oracle::OracleConfig model;
  double noise_sigma = 0.0;
  std::size_t histogram_bins = 20;
};

struct MineCfg {
  miner::MinerCfg gate;
  std::size_t threads = 0;  // 0: hardware concurrency
};

struct IndexCfg {
  bool hnsw = true;
  index::HnswParams params;
};

struct EvalCfg {
  std::string relevance = "gold";  // "gold" or "threshold"
  double threshold = 0.1;
  std::vector<std::size_t> k_list{1, 3};
  double min_gap = 0.02;
  std::size_t max_gen_len = 8;
  bool generation = true;
  std::size_t latency_queries = 100;
  std::size_t latency_repetitions = 5;
  std::size_t latency_warmup = 1;
};

struct ServeCfg {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t default_k = 10;
};

/// Every tunable of the pipeline. One global seed; stages derive their own.
struct PipelineConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  PathsCfg paths;
  SynthSpec synth;
  DataCfg data;
  OracleCfg oracle;
  reward::RewardTrainCfg reward;
  MineCfg miner;
  retriever::DistillCfg distill;
  IndexCfg index;
  EvalCfg eval;
  ServeCfg serve;

  /// Range checks across all sections. Throws ConfigError.
  void validate() const;
};

/// Parses a config document. Unknown keys and wrong types are ConfigErrors;
/// missing keys keep their defaults.
PipelineConfig parse_config(std::string_view json_text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_json(const PipelineConfig& cfg);

/// UAE_DATA_DIR replaces paths.data_dir, UAE_PORT replaces serve.port.
using EnvLookup = std::function<std::optional<std::string>(const char*)>;
void apply_env_overrides(PipelineConfig& cfg, const EnvLookup& env);
void apply_env_overrides(PipelineConfig& cfg);

/// Copies the global seed into every stage section.
void propagate_seed(PipelineConfig& cfg);

}  // namespace uae::app
