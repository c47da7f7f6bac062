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

#include "uae/eval/latency.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "uae/common.hpp"

namespace uae::eval {

LatencyStats summarize_latency(std::span<const double> samples_ms) {
  if (samples_ms.empty()) throw ValidationError("no latency samples");
  std::vector<double> s(samples_ms.begin(), samples_ms.end());
  std::sort(s.begin(), s.end());
  LatencyStats out;
  out.samples = s.size();
  const auto n = s.size();
  out.median_ms = n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
  double sum = 0.0;
  for (double x : s) sum += x;
  out.mean_ms = sum / static_cast<double>(n);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  out.p95_ms = s[std::max<std::size_t>(rank, 1) - 1];
  return out;
}

LatencyReport latency_bench(const LatencyPaths& paths, std::size_t queries,
                            std::size_t repetitions, std::size_t warmup) {
  if (repetitions == 0) throw ConfigError("latency repetitions must be >= 1");
  if (queries == 0) throw ConfigError("latency benchmark needs at least one query");
  if (!paths.index_path || !paths.rerank_path) throw ConfigError("latency paths not configured");
  using clock = std::chrono::steady_clock;

  for (std::size_t w = 0; w < warmup; ++w) {
    for (std::size_t i = 0; i < queries; ++i) {
      paths.index_path(i);
      paths.rerank_path(i);
    }
  }
  std::vector<double> index_ms, rerank_ms;
  std::size_t evals = 0;
  for (std::size_t r = 0; r < repetitions; ++r) {
    for (std::size_t i = 0; i < queries; ++i) {
      auto t0 = clock::now();
      paths.index_path(i);
      auto t1 = clock::now();
      index_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    for (std::size_t i = 0; i < queries; ++i) {
      auto t0 = clock::now();
      evals += paths.rerank_path(i);
      auto t1 = clock::now();
      rerank_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
  }
  LatencyReport rep;
  rep.index_path = summarize_latency(index_ms);
  rep.rerank_path = summarize_latency(rerank_ms);
  rep.speedup = rep.index_path.median_ms > 0.0
                    ? rep.rerank_path.median_ms / rep.index_path.median_ms
                    : 0.0;
  rep.rerank_evals_per_query =
      static_cast<double>(evals) / static_cast<double>(queries * repetitions);
  rep.queries = queries;
  rep.repetitions = repetitions;
  return rep;
}

}  // namespace uae::eval
