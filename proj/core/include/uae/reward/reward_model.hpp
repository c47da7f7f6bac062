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
#include <string_view>
#include <vector>

#include "uae/common.hpp"

namespace uae::reward {

struct RewardDims {
  std::size_t vocab_size = 0;
  std::size_t dim = 64;
  std::size_t hidden = 512;
};

/// Cross-scorer R(q, d).
///
/// Query and document tokens are mean-pooled through a shared embedding table
/// into qbar and dbar; the feature vector [qbar; dbar; qbar*dbar; |qbar-dbar|]
/// goes through tanh(W1 z + b1) and a linear readout w2 . h + b2.
///
/// All parameters live in one flat vector (E, W1, b1, w2, b2, in that order),
/// which is what the optimizer, checkpoints and gradient checks operate on.
class RewardScorer {
 public:
  RewardScorer() = default;
  /// Scaled-uniform initialization from `seed`; biases start at zero.
  RewardScorer(RewardDims dims, std::uint64_t seed);

  double score(std::span<const TokenId> q, std::span<const TokenId> d) const;

  /// Adds `upstream * d score / d params` into `grad` and returns the score.
  double accumulate_grad(std::span<const TokenId> q, std::span<const TokenId> d,
                         double upstream, std::span<double> grad) const;

  const RewardDims& dims() const { return dims_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t num_params() const { return params_.size(); }

  void save(const std::filesystem::path& path) const;
  static RewardScorer load(const std::filesystem::path& path);

  friend bool operator==(const RewardScorer& a, const RewardScorer& b) {
    return a.dims_.vocab_size == b.dims_.vocab_size && a.dims_.dim == b.dims_.dim &&
           a.dims_.hidden == b.dims_.hidden && a.params_ == b.params_;
  }

  static constexpr std::string_view kMagic = "UAERM1";
  static constexpr std::uint16_t kVersion = 1;

 private:
  struct Forward {
    std::vector<double> qbar, dbar, z, h;
    double score = 0.0;
  };
  void forward(std::span<const TokenId> q, std::span<const TokenId> d, Forward& f) const;
  void pool(std::span<const TokenId> toks, std::vector<double>& out) const;
  void layout();

  RewardDims dims_;
  std::vector<double> params_;
  std::size_t off_w1_ = 0, off_b1_ = 0, off_w2_ = 0, off_b2_ = 0;
};

}  // namespace uae::reward
