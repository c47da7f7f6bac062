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

#include <functional>
#include <span>
#include <vector>

namespace uae::eval {

struct LatencyStats {
  double median_ms = 0.0;
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  std::size_t samples = 0;
};

/// Median, mean and nearest-rank 95th percentile. Throws on empty input.
LatencyStats summarize_latency(std::span<const double> samples_ms);

struct LatencyReport {
  LatencyStats index_path;
  LatencyStats rerank_path;
  double speedup = 0.0;  // rerank median / index median
  double rerank_evals_per_query = 0.0;
  std::size_t queries = 0;
  std::size_t repetitions = 0;
};

struct LatencyPaths {
  /// Serves query `i` through encode + ANN search.
  std::function<void(std::size_t)> index_path;
  /// Serves query `i` by scoring its pool; returns the number of scorer calls.
  std::function<std::size_t(std::size_t)> rerank_path;
};

/// Single-threaded wall-clock benchmark on a monotonic clock. Each query is
/// timed individually, `repetitions` times per path, after `warmup` untimed
/// passes over all queries. Throws ConfigError when repetitions is 0 or there
/// are no queries.
LatencyReport latency_bench(const LatencyPaths& paths, std::size_t queries,
                            std::size_t repetitions, std::size_t warmup = 1);

}  // namespace uae::eval
