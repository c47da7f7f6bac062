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
#include "uae/oracle/generator.hpp"

namespace uae::oracle {

struct UtilityRecord {
  std::string query_id;
  std::string doc_id;
  double utility = 0.0;

  friend bool operator==(const UtilityRecord&, const UtilityRecord&) = default;
};

/// Multiplicative log-normal noise on utilities. sigma = 0 disables it.
struct NoiseConfig {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Applies U * exp(sigma * z), clamped to 1, with z drawn from a stream keyed
/// by (seed, query_id, doc_id). Serial and parallel callers agree.
double apply_noise(double utility, const NoiseConfig& noise, std::string_view query_id,
                   std::string_view doc_id);

/// Expected utility of every (query, pool doc) pair, ordered by query_id and
/// then pool order.
std::vector<UtilityRecord> score_pools(const Generator& gen, const data::Dataset& ds,
                                       const NoiseConfig& noise = {});

/// Training sequences for the background model: every document, plus
/// "SEP answer EOS" for each answer of the given queries.
std::vector<TokenSeq> oracle_training_corpus(const data::Dataset& ds,
                                             std::span<const std::string> answer_query_ids);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

/// Equal-width bins spanning [min, max] of `values`; the last bin is closed.
std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins);
void write_histogram_csv(const std::filesystem::path& path,
                         std::span<const HistogramBin> bins);

void write_utilities(const std::filesystem::path& path,
                     std::span<const UtilityRecord> records);
std::vector<UtilityRecord> read_utilities(const std::filesystem::path& path);

}  // namespace uae::oracle
