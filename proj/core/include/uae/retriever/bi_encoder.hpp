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
#include <string_view>
#include <vector>

#include "uae/common.hpp"
#include "uae/data/tokenizer.hpp"

namespace uae::retriever {

/// Shared query/document encoder f(x) = normalize(tanh(W mean(E[x]) + b)).
///
/// Parameters are one flat vector laid out as E (vocab x dim), W (dim x dim,
/// row-major), b (dim).
class BiEncoder {
 public:
  BiEncoder() = default;
  BiEncoder(std::size_t vocab_size, std::size_t dim, std::uint64_t seed);

  struct Cache {
    std::vector<double> pooled;
    std::vector<double> h;
    std::vector<double> y;
    double norm = 0.0;
  };

  /// Unit vector for `tokens`. Throws ValidationError on an empty sequence,
  /// an out-of-range token or a zero pre-normalization vector.
  std::vector<double> encode(std::span<const TokenId> tokens) const;
  void forward(std::span<const TokenId> tokens, Cache& cache) const;

  /// Adds d(loss)/d(params) into `grad` given d(loss)/d(y) for a forward pass.
  void backward(std::span<const TokenId> tokens, const Cache& cache,
                std::span<const double> dy, std::span<double> grad) const;

  std::size_t vocab_size() const { return vocab_; }
  std::size_t dim() const { return dim_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t num_params() const { return params_.size(); }

  /// Writes the checkpoint; `vocab`, when given, is stored after the weights
  /// so that the encoder can tokenize on its own.
  void save(const std::filesystem::path& path, const data::Tokenizer* vocab = nullptr) const;

  struct Loaded;
  static Loaded load(const std::filesystem::path& path);

  friend bool operator==(const BiEncoder& a, const BiEncoder& b) {
    return a.vocab_ == b.vocab_ && a.dim_ == b.dim_ && a.params_ == b.params_;
  }

  static constexpr std::string_view kMagic = "UAEBE1";
  static constexpr std::uint16_t kVersion = 1;

 private:
  std::size_t vocab_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> params_;
};

struct BiEncoder::Loaded {
  BiEncoder encoder;
  std::optional<data::Tokenizer> tokenizer;
};

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace uae::retriever
