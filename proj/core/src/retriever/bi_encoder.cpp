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

#include "uae/retriever/bi_encoder.hpp"

#include <cmath>
#include <random>

#include "uae/binary_io.hpp"
#include "uae/optim.hpp"

namespace uae::retriever {

BiEncoder::BiEncoder(std::size_t vocab_size, std::size_t dim, std::uint64_t seed)
    : vocab_(vocab_size), dim_(dim) {
  if (vocab_size == 0 || dim == 0) throw ConfigError("encoder needs vocab_size and dim >= 1");
  params_.assign(vocab_ * dim_ + dim_ * dim_ + dim_, 0.0);
  std::mt19937_64 rng(seed);
  const double d = static_cast<double>(dim_);
  std::span<double> all(params_);
  uniform_init(all.subspan(0, vocab_ * dim_), std::sqrt(3.0 / d), rng);
  uniform_init(all.subspan(vocab_ * dim_, dim_ * dim_), std::sqrt(6.0 / (2.0 * d)), rng);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void BiEncoder::forward(std::span<const TokenId> tokens, Cache& c) const {
  if (tokens.empty()) throw ValidationError("cannot encode an empty token sequence");
  c.pooled.assign(dim_, 0.0);
  for (auto t : tokens) {
    if (t >= vocab_) throw ValidationError("token id out of encoder vocabulary");
    const double* e = params_.data() + static_cast<std::size_t>(t) * dim_;
    for (std::size_t k = 0; k < dim_; ++k) c.pooled[k] += e[k];
  }
  const double inv = 1.0 / static_cast<double>(tokens.size());
  for (auto& x : c.pooled) x *= inv;

  const double* w = params_.data() + vocab_ * dim_;
  const double* b = w + dim_ * dim_;
  c.h.resize(dim_);
  double sq = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    double a = b[i];
    const double* row = w + i * dim_;
    for (std::size_t k = 0; k < dim_; ++k) a += row[k] * c.pooled[k];
    c.h[i] = std::tanh(a);
    sq += c.h[i] * c.h[i];
  }
  c.norm = std::sqrt(sq);
  if (!(c.norm > 0.0)) throw ValidationError("encoder produced a zero vector");
  c.y.resize(dim_);
  for (std::size_t i = 0; i < dim_; ++i) c.y[i] = c.h[i] / c.norm;
}

std::vector<double> BiEncoder::encode(std::span<const TokenId> tokens) const {
  Cache c;
  forward(tokens, c);
  return std::move(c.y);
}

void BiEncoder::backward(std::span<const TokenId> tokens, const Cache& c,
                         std::span<const double> dy, std::span<double> grad) const {
  const double* w = params_.data() + vocab_ * dim_;
  double* gw = grad.data() + vocab_ * dim_;
  double* gb = gw + dim_ * dim_;
  const double yg = dot(c.y, dy);
  std::vector<double> da(dim_), dp(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double dh = (dy[i] - c.y[i] * yg) / c.norm;
    da[i] = dh * (1.0 - c.h[i] * c.h[i]);
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    if (da[i] == 0.0) continue;
    gb[i] += da[i];
    const double* row = w + i * dim_;
    double* grow = gw + i * dim_;
    for (std::size_t k = 0; k < dim_; ++k) {
      grow[k] += da[i] * c.pooled[k];
      dp[k] += row[k] * da[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(tokens.size());
  for (auto t : tokens) {
    double* ge = grad.data() + static_cast<std::size_t>(t) * dim_;
    for (std::size_t k = 0; k < dim_; ++k) ge[k] += dp[k] * inv;
  }
}

void BiEncoder::save(const std::filesystem::path& path, const data::Tokenizer* vocab) const {
  BinaryWriter w;
  w.bytes(kMagic);
  w.u16(kVersion);
  w.u32(static_cast<std::uint32_t>(vocab_));
  w.u32(static_cast<std::uint32_t>(dim_));
  w.u64(params_.size());
  w.f64s(params_);
  if (vocab) {
    if (vocab->size() != vocab_) throw ConfigError("tokenizer size does not match the encoder");
    w.u32(static_cast<std::uint32_t>(vocab->size()));
    for (const auto& t : vocab->vocab()) w.str(t);
  }
  w.save(path);
}

BiEncoder::Loaded BiEncoder::load(const std::filesystem::path& path) {
  auto in = BinaryReader::from_file(path);
  expect_header(in, kMagic, kVersion);
  Loaded out;
  auto& e = out.encoder;
  e.vocab_ = in.u32();
  e.dim_ = in.u32();
  const auto n = in.u64();
  if (e.vocab_ == 0 || e.dim_ == 0) throw FormatError("encoder checkpoint has zero dimensions");
  if (n != e.vocab_ * e.dim_ + e.dim_ * e.dim_ + e.dim_) {
    throw FormatError("encoder checkpoint parameter count mismatch");
  }
  in.need(n * 8);
  e.params_.resize(n);
  in.f64s(e.params_);
  if (!in.at_end()) {
    const auto count = in.u32();
    if (count != e.vocab_) throw FormatError("encoder vocabulary section size mismatch");
    std::vector<std::string> tokens;
    tokens.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) tokens.push_back(in.str());
    if (!in.at_end()) throw FormatError("trailing bytes in encoder checkpoint");
    try {
      out.tokenizer = data::Tokenizer::from_vocab(std::move(tokens));
    } catch (const ValidationError& err) {
      throw FormatError(std::string("bad encoder vocabulary: ") + err.what());
    }
  }
  return out;
}

}  // namespace uae::retriever
