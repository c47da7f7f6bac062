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

#include "uae/reward/reward_model.hpp"

#include <cmath>
#include <random>

#include "uae/binary_io.hpp"
#include "uae/optim.hpp"

namespace uae::reward {

RewardScorer::RewardScorer(RewardDims dims, std::uint64_t seed) : dims_(dims) {
  if (dims.vocab_size == 0 || dims.dim == 0 || dims.hidden == 0) {
    throw ConfigError("reward model dimensions must be positive");
  }
  layout();
  std::mt19937_64 rng(seed);
  const auto d = static_cast<double>(dims_.dim);
  const auto h = static_cast<double>(dims_.hidden);
  std::span<double> p(params_);
  uniform_init(p.subspan(0, off_w1_), std::sqrt(3.0 / d), rng);
  uniform_init(p.subspan(off_w1_, off_b1_ - off_w1_), std::sqrt(6.0 / (4.0 * d + h)), rng);
  uniform_init(p.subspan(off_w2_, off_b2_ - off_w2_), std::sqrt(6.0 / (h + 1.0)), rng);
}

void RewardScorer::layout() {
  const std::size_t d = dims_.dim, h = dims_.hidden;
  off_w1_ = dims_.vocab_size * d;
  off_b1_ = off_w1_ + h * 4 * d;
  off_w2_ = off_b1_ + h;
  off_b2_ = off_w2_ + h;
  params_.assign(off_b2_ + 1, 0.0);
}

void RewardScorer::pool(std::span<const TokenId> toks, std::vector<double>& out) const {
  const std::size_t d = dims_.dim;
  out.assign(d, 0.0);
  if (toks.empty()) return;
  for (TokenId t : toks) {
    if (t >= dims_.vocab_size) throw ValidationError("token id outside reward vocabulary");
    const double* row = params_.data() + static_cast<std::size_t>(t) * d;
    for (std::size_t k = 0; k < d; ++k) out[k] += row[k];
  }
  const double inv = 1.0 / static_cast<double>(toks.size());
  for (double& x : out) x *= inv;
}

void RewardScorer::forward(std::span<const TokenId> q, std::span<const TokenId> d,
                           Forward& f) const {
  const std::size_t dim = dims_.dim, hid = dims_.hidden;
  pool(q, f.qbar);
  pool(d, f.dbar);
  f.z.resize(4 * dim);
  for (std::size_t k = 0; k < dim; ++k) {
    f.z[k] = f.qbar[k];
    f.z[dim + k] = f.dbar[k];
    f.z[2 * dim + k] = f.qbar[k] * f.dbar[k];
    f.z[3 * dim + k] = std::abs(f.qbar[k] - f.dbar[k]);
  }
  f.h.resize(hid);
  const double* w1 = params_.data() + off_w1_;
  const double* b1 = params_.data() + off_b1_;
  const double* w2 = params_.data() + off_w2_;
  double s = params_[off_b2_];
  for (std::size_t j = 0; j < hid; ++j) {
    const double* row = w1 + j * 4 * dim;
    double a = b1[j];
    for (std::size_t k = 0; k < 4 * dim; ++k) a += row[k] * f.z[k];
    f.h[j] = std::tanh(a);
    s += w2[j] * f.h[j];
  }
  f.score = s;
}

double RewardScorer::score(std::span<const TokenId> q, std::span<const TokenId> d) const {
  Forward f;
  forward(q, d, f);
  return f.score;
}

double RewardScorer::accumulate_grad(std::span<const TokenId> q, std::span<const TokenId> d,
                                     double upstream, std::span<double> grad) const {
  Forward f;
  forward(q, d, f);
  if (upstream == 0.0) return f.score;

  const std::size_t dim = dims_.dim, hid = dims_.hidden;
  const double* w1 = params_.data() + off_w1_;
  const double* w2 = params_.data() + off_w2_;
  double* g_w1 = grad.data() + off_w1_;
  double* g_b1 = grad.data() + off_b1_;
  double* g_w2 = grad.data() + off_w2_;
  grad[off_b2_] += upstream;

  std::vector<double> dz(4 * dim, 0.0);
  for (std::size_t j = 0; j < hid; ++j) {
    g_w2[j] += upstream * f.h[j];
    const double da = upstream * w2[j] * (1.0 - f.h[j] * f.h[j]);
    if (da == 0.0) continue;
    g_b1[j] += da;
    const double* row = w1 + j * 4 * dim;
    double* g_row = g_w1 + j * 4 * dim;
    for (std::size_t k = 0; k < 4 * dim; ++k) {
      g_row[k] += da * f.z[k];
      dz[k] += da * row[k];
    }
  }

  std::vector<double> dq(dim), dd(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double diff = f.qbar[k] - f.dbar[k];
    const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    dq[k] = dz[k] + dz[2 * dim + k] * f.dbar[k] + dz[3 * dim + k] * sgn;
    dd[k] = dz[dim + k] + dz[2 * dim + k] * f.qbar[k] - dz[3 * dim + k] * sgn;
  }
  auto scatter = [&](std::span<const TokenId> toks, const std::vector<double>& g) {
    if (toks.empty()) return;
    const double inv = 1.0 / static_cast<double>(toks.size());
    for (TokenId t : toks) {
      double* row = grad.data() + static_cast<std::size_t>(t) * dim;
      for (std::size_t k = 0; k < dim; ++k) row[k] += g[k] * inv;
    }
  };
  scatter(q, dq);
  scatter(d, dd);
  return f.score;
}

void RewardScorer::save(const std::filesystem::path& path) const {
  BinaryWriter w;
  w.bytes(kMagic);
  w.u16(kVersion);
  w.u32(static_cast<std::uint32_t>(dims_.vocab_size));
  w.u32(static_cast<std::uint32_t>(dims_.dim));
  w.u32(static_cast<std::uint32_t>(dims_.hidden));
  w.u64(params_.size());
  w.f64s(params_);
  w.save(path);
}

RewardScorer RewardScorer::load(const std::filesystem::path& path) {
  auto in = BinaryReader::from_file(path);
  expect_header(in, kMagic, kVersion);
  RewardScorer m;
  m.dims_.vocab_size = in.u32();
  m.dims_.dim = in.u32();
  m.dims_.hidden = in.u32();
  const auto n = in.u64();
  if (m.dims_.vocab_size == 0 || m.dims_.dim == 0 || m.dims_.hidden == 0) {
    throw FormatError("reward checkpoint has zero dimensions");
  }
  m.layout();
  if (n != m.params_.size()) throw FormatError("reward checkpoint parameter count mismatch");
  in.need(n * 8);
  in.f64s(m.params_);
  if (!in.at_end()) throw FormatError("trailing bytes in reward checkpoint");
  return m;
}

}  // namespace uae::reward
