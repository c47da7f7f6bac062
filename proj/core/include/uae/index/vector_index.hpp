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
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uae/common.hpp"
#include "uae/ranking.hpp"

namespace uae::index {

/// Dense rows of unit vectors with aligned doc_ids; inner-product metric.
class VectorIndex {
 public:
  VectorIndex() = default;

  /// Throws ValidationError on an empty input, mismatched dimensions, a row
  /// whose norm is not 1 +- 1e-6 or a repeated doc_id.
  static VectorIndex build(std::span<const std::pair<std::string, std::vector<double>>> rows);

  /// Exact top-k by inner product, ties by ascending doc_id.
  std::vector<ScoredDoc> search(std::span<const double> q, std::size_t k) const;

  /// Inner product of row `i` with `q`, accumulated in double precision.
  double score(std::size_t i, std::span<const double> q) const;

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const std::string> ids() const { return ids_; }
  const float* row(std::size_t i) const { return data_.data() + i * dim_; }
  std::span<const float> data() const { return data_; }

  friend bool operator==(const VectorIndex&, const VectorIndex&) = default;

 private:
  friend class Index;
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> data_;
};

struct HnswParams {
  std::size_t M = 16;
  std::size_t ef_construction = 200;
  std::size_t ef_search = 128;
  std::uint64_t seed = 42;

  friend bool operator==(const HnswParams&, const HnswParams&) = default;
};

/// Layered proximity graph over the rows of a VectorIndex.
class HnswGraph {
 public:
  HnswGraph() = default;

  /// Inserts rows in order with seeded geometric levels, then makes layer 0
  /// symmetric and connected.
  static HnswGraph build(const VectorIndex& vectors, const HnswParams& params);

  /// Approximate top-k; `ef` = 0 uses params().ef_search. Scores are exact
  /// inner products and ties go to the smaller doc_id.
  std::vector<ScoredDoc> search(const VectorIndex& vectors, std::span<const double> q,
                                std::size_t k, std::size_t ef = 0) const;

  const HnswParams& params() const { return params_; }
  std::uint32_t entry_point() const { return entry_; }
  std::size_t max_level() const { return max_level_; }
  std::size_t level(std::uint32_t node) const { return links_[node].size() - 1; }
  std::span<const std::uint32_t> neighbors(std::uint32_t node, std::size_t layer) const {
    return links_[node][layer];
  }
  std::size_t size() const { return links_.size(); }

  /// Nodes reachable from the entry point through layer-0 edges.
  std::size_t reachable_count() const;
  bool layer0_symmetric() const;

  friend bool operator==(const HnswGraph&, const HnswGraph&) = default;

 private:
  friend class Index;
  void repair_layer0(const VectorIndex& vectors);

  HnswParams params_;
  std::uint32_t entry_ = 0;
  std::size_t max_level_ = 0;
  std::vector<std::vector<std::vector<std::uint32_t>>> links_;  // node -> layer -> ids
};

/// Vectors plus an optional HNSW graph, as stored on disk.
class Index {
 public:
  VectorIndex vectors;
  std::optional<HnswGraph> hnsw;

  /// HNSW when present, exact otherwise. Throws ValidationError when empty or
  /// k < 1 or the query dimension is wrong.
  std::vector<ScoredDoc> search(std::span<const double> q, std::size_t k) const;
  std::vector<ScoredDoc> search_exact(std::span<const double> q, std::size_t k) const;

  void save(const std::filesystem::path& path) const;
  static Index load(const std::filesystem::path& path);
  std::string serialize() const;
  static Index deserialize(std::string bytes);

  friend bool operator==(const Index&, const Index&) = default;

  static constexpr std::string_view kMagic = "UAEIDX1";
  static constexpr std::uint16_t kVersion = 1;
  static constexpr std::uint8_t kMetricInnerProduct = 0;
};

/// |top-k(approx) intersect top-k(exact)| / |top-k(exact)|.
double overlap_recall(std::span<const ScoredDoc> approx, std::span<const ScoredDoc> exact);

}  // namespace uae::index
