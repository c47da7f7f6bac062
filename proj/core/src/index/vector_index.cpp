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

#include "uae/index/vector_index.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <set>
#include <unordered_set>

#include "uae/binary_io.hpp"

namespace uae::index {

namespace {

float dotf(const float* a, const float* b, std::size_t n) {
  float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (std::size_t j = 0; j < 8; ++j) acc[j] += a[i + j] * b[i + j];
  }
  float s = ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void check_query(const VectorIndex& v, std::span<const double> q, std::size_t k) {
  if (v.size() == 0) throw ValidationError("search on an empty index");
  if (k < 1) throw ValidationError("k must be >= 1");
  if (q.size() != v.dim()) throw ValidationError("query dimension does not match the index");
}

}  // namespace

VectorIndex VectorIndex::build(
    std::span<const std::pair<std::string, std::vector<double>>> rows) {
  if (rows.empty()) throw ValidationError("cannot build an index from zero vectors");
  VectorIndex v;
  v.dim_ = rows.front().second.size();
  if (v.dim_ == 0) throw ValidationError("index vectors must have dim >= 1");
  std::unordered_set<std::string> seen;
  v.ids_.reserve(rows.size());
  v.data_.reserve(rows.size() * v.dim_);
  for (const auto& [id, vec] : rows) {
    if (vec.size() != v.dim_) throw ValidationError("dimension mismatch for \"" + id + "\"");
    double sq = 0.0;
    for (double x : vec) sq += x * x;
    if (!(std::abs(std::sqrt(sq) - 1.0) <= 1e-6)) {
      throw ValidationError("vector for \"" + id + "\" is not unit-norm");
    }
    if (!seen.insert(id).second) throw ValidationError("duplicate doc_id \"" + id + "\"");
    v.ids_.push_back(id);
    for (double x : vec) v.data_.push_back(static_cast<float>(x));
  }
  return v;
}

double VectorIndex::score(std::size_t i, std::span<const double> q) const {
  const float* r = row(i);
  double s = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) s += static_cast<double>(r[k]) * q[k];
  return s;
}

std::vector<ScoredDoc> VectorIndex::search(std::span<const double> q, std::size_t k) const {
  check_query(*this, q, k);
  std::vector<std::pair<double, std::size_t>> all(size());
  for (std::size_t i = 0; i < size(); ++i) all[i] = {score(i, q), i};
  auto before = [&](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : ids_[a.second] < ids_[b.second];
  };
  const auto n = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), before);
  std::vector<ScoredDoc> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({ids_[all[i].second], all[i].first});
  return out;
}

// ---------------------------------------------------------------------------
// HNSW

namespace {

struct Cand {
  float sim;
  std::uint32_t id;
};
struct Closer {  // max-heap on similarity
  bool operator()(const Cand& a, const Cand& b) const {
    return a.sim != b.sim ? a.sim < b.sim : a.id > b.id;
  }
};
struct Farther {  // min-heap on similarity
  bool operator()(const Cand& a, const Cand& b) const {
    return a.sim != b.sim ? a.sim > b.sim : a.id < b.id;
  }
};

class Visited {
 public:
  explicit Visited(std::size_t n) : mark_(n, 0) {}
  bool insert(std::uint32_t i) {
    if (mark_[i] == tag_) return false;
    mark_[i] = tag_;
    return true;
  }
  void ensure(std::size_t n) {
    if (mark_.size() < n) {
      mark_.assign(n, 0);
      tag_ = 1;
    }
  }
  void reset() {
    if (++tag_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      tag_ = 1;
    }
  }

 private:
  std::vector<std::uint32_t> mark_;
  std::uint32_t tag_ = 1;
};

using Links = std::vector<std::vector<std::vector<std::uint32_t>>>;

/// Best-first search on one layer; returns up to `ef` candidates, best first.
std::vector<Cand> search_layer(const VectorIndex& v, const Links& links, const float* q,
                               std::vector<Cand> entry, std::size_t ef, std::size_t layer,
                               Visited& visited) {
  visited.reset();
  std::priority_queue<Cand, std::vector<Cand>, Closer> frontier;
  std::priority_queue<Cand, std::vector<Cand>, Farther> best;
  for (const auto& e : entry) {
    visited.insert(e.id);
    frontier.push(e);
    best.push(e);
  }
  while (best.size() > ef) best.pop();
  while (!frontier.empty()) {
    const Cand c = frontier.top();
    if (best.size() >= ef && c.sim < best.top().sim) break;
    frontier.pop();
    for (auto n : links[c.id][layer]) {
      if (!visited.insert(n)) continue;
      const float s = dotf(q, v.row(n), v.dim());
      if (best.size() < ef || s > best.top().sim) {
        frontier.push({s, n});
        best.push({s, n});
        if (best.size() > ef) best.pop();
      }
    }
  }
  std::vector<Cand> out;
  out.reserve(best.size());
  while (!best.empty()) {
    out.push_back(best.top());
    best.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

/// Keeps a candidate only if it is closer to the base than to every
/// neighbor already kept. `cands` must be best first.
std::vector<std::uint32_t> select_neighbors(const VectorIndex& v, const std::vector<Cand>& cands,
                                            std::size_t m) {
  std::vector<std::uint32_t> out;
  for (const auto& c : cands) {
    if (out.size() >= m) break;
    bool keep = true;
    for (auto r : out) {
      if (dotf(v.row(c.id), v.row(r), v.dim()) > c.sim) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(c.id);
  }
  // Fill remaining slots with the closest pruned candidates.
  for (const auto& c : cands) {
    if (out.size() >= m) break;
    if (std::find(out.begin(), out.end(), c.id) == out.end()) out.push_back(c.id);
  }
  return out;
}

void shrink(const VectorIndex& v, std::vector<std::uint32_t>& list, std::uint32_t base,
            std::size_t cap) {
  if (list.size() <= cap) return;
  std::vector<Cand> cands;
  for (auto n : list) cands.push_back({dotf(v.row(base), v.row(n), v.dim()), n});
  std::sort(cands.begin(), cands.end(), Closer{});
  std::reverse(cands.begin(), cands.end());
  list = select_neighbors(v, cands, cap);
}

}  // namespace

HnswGraph HnswGraph::build(const VectorIndex& v, const HnswParams& params) {
  if (v.size() == 0) throw ValidationError("cannot build HNSW over an empty index");
  if (params.M < 2) throw ConfigError("HNSW M must be >= 2");
  if (params.ef_construction < 1 || params.ef_search < 1) {
    throw ConfigError("HNSW ef parameters must be >= 1");
  }
  if (v.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("too many vectors for HNSW");
  }
  HnswGraph g;
  g.params_ = params;
  const std::size_t n = v.size();
  const std::size_t m0 = 2 * params.M;
  const double ml = 1.0 / std::log(static_cast<double>(params.M));
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  g.links_.resize(n);
  Visited visited(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double u = std::max(unif(rng), 1e-300);
    const auto lvl = static_cast<std::size_t>(std::min(-std::log(u) * ml, 30.0));
    g.links_[i].resize(lvl + 1);
    if (i == 0) {
      g.entry_ = 0;
      g.max_level_ = lvl;
      continue;
    }
    const float* q = v.row(i);
    Cand ep{dotf(q, v.row(g.entry_), v.dim()), g.entry_};
    for (std::size_t layer = g.max_level_; layer > lvl; --layer) {
      ep = search_layer(v, g.links_, q, {ep}, 1, layer, visited).front();
    }
    std::vector<Cand> entry{ep};
    for (std::size_t layer = std::min(lvl, g.max_level_) + 1; layer-- > 0;) {
      auto found = search_layer(v, g.links_, q, entry, params.ef_construction, layer, visited);
      const std::size_t cap = layer == 0 ? m0 : params.M;
      const auto chosen = select_neighbors(v, found, cap);
      g.links_[i][layer] = chosen;
      for (auto nb : chosen) {
        auto& back = g.links_[nb][layer];
        back.push_back(i);
        shrink(v, back, nb, cap);
      }
      entry = std::move(found);
    }
    if (lvl > g.max_level_) {
      g.max_level_ = lvl;
      g.entry_ = i;
    }
  }
  g.repair_layer0(v);
  return g;
}

void HnswGraph::repair_layer0(const VectorIndex& v) {
  const std::size_t n = links_.size();
  const std::size_t cap = 2 * params_.M;
  auto has = [&](std::uint32_t a, std::uint32_t b) {
    const auto& l = links_[a][0];
    return std::find(l.begin(), l.end(), b) != l.end();
  };
  // Symmetrize: add the reverse edge when there is room, drop the edge otherwise.
  for (std::uint32_t a = 0; a < n; ++a) {
    auto& la = links_[a][0];
    for (std::size_t j = 0; j < la.size();) {
      const auto b = la[j];
      if (has(b, a)) {
        ++j;
      } else if (links_[b][0].size() < cap) {
        links_[b][0].push_back(a);
        ++j;
      } else {
        la.erase(la.begin() + static_cast<std::ptrdiff_t>(j));
      }
    }
  }
  // Attach every unreachable node to its most similar reachable node with room.
  for (;;) {
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> stack{entry_};
    seen[entry_] = 1;
    while (!stack.empty()) {
      const auto a = stack.back();
      stack.pop_back();
      for (auto b : links_[a][0]) {
        if (!seen[b]) {
          seen[b] = 1;
          stack.push_back(b);
        }
      }
    }
    std::uint32_t orphan = static_cast<std::uint32_t>(n);
    for (std::uint32_t a = 0; a < n; ++a) {
      if (!seen[a]) {
        orphan = a;
        break;
      }
    }
    if (orphan == n) break;
    std::uint32_t best = static_cast<std::uint32_t>(n);
    float best_sim = -std::numeric_limits<float>::infinity();
    for (std::uint32_t a = 0; a < n; ++a) {
      if (!seen[a] || links_[a][0].size() >= cap) continue;
      const float s = dotf(v.row(a), v.row(orphan), v.dim());
      if (s > best_sim) {
        best_sim = s;
        best = a;
      }
    }
    if (best == n) throw Error("HNSW repair found no reachable node with free capacity");
    if (links_[orphan][0].size() >= cap) links_[orphan][0].pop_back();
    links_[orphan][0].push_back(best);
    links_[best][0].push_back(orphan);
    // Dropping an edge above may have broken symmetry; restore it.
    for (std::uint32_t a = 0; a < n; ++a) {
      auto& la = links_[a][0];
      la.erase(std::remove_if(la.begin(), la.end(), [&](std::uint32_t b) { return !has(b, a); }),
               la.end());
    }
  }
}

std::size_t HnswGraph::reachable_count() const {
  if (links_.empty()) return 0;
  std::vector<char> seen(links_.size(), 0);
  std::vector<std::uint32_t> stack{entry_};
  seen[entry_] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto a = stack.back();
    stack.pop_back();
    for (auto b : links_[a][0]) {
      if (!seen[b]) {
        seen[b] = 1;
        ++count;
        stack.push_back(b);
      }
    }
  }
  return count;
}

bool HnswGraph::layer0_symmetric() const {
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t a = 0; a < links_.size(); ++a) {
    for (auto b : links_[a][0]) edges.emplace(a, b);
  }
  for (const auto& [a, b] : edges) {
    if (!edges.contains({b, a})) return false;
  }
  return true;
}

std::vector<ScoredDoc> HnswGraph::search(const VectorIndex& v, std::span<const double> q,
                                         std::size_t k, std::size_t ef) const {
  check_query(v, q, k);
  if (links_.size() != v.size()) throw ValidationError("HNSW graph does not match the vectors");
  if (ef == 0) ef = params_.ef_search;
  ef = std::max(ef, k);
  std::vector<float> qf(q.begin(), q.end());
  thread_local Visited visited(0);
  visited.ensure(v.size());
  Cand ep{dotf(qf.data(), v.row(entry_), v.dim()), entry_};
  for (std::size_t layer = max_level_; layer > 0; --layer) {
    ep = search_layer(v, links_, qf.data(), {ep}, 1, layer, visited).front();
  }
  const auto found = search_layer(v, links_, qf.data(), {ep}, ef, 0, visited);
  std::vector<ScoredDoc> out;
  out.reserve(found.size());
  for (const auto& c : found) out.push_back({v.ids()[c.id], v.score(c.id, q)});
  top_k(out, k);
  return out;
}

// ---------------------------------------------------------------------------
// Index

std::vector<ScoredDoc> Index::search(std::span<const double> q, std::size_t k) const {
  if (hnsw) return hnsw->search(vectors, q, k);
  return vectors.search(q, k);
}

std::vector<ScoredDoc> Index::search_exact(std::span<const double> q, std::size_t k) const {
  return vectors.search(q, k);
}

std::string Index::serialize() const {
  BinaryWriter w;
  w.bytes(kMagic);
  w.u16(kVersion);
  w.u32(static_cast<std::uint32_t>(vectors.dim_));
  w.u64(vectors.ids_.size());
  w.u8(kMetricInnerProduct);
  for (const auto& id : vectors.ids_) w.str(id);
  for (float x : vectors.data_) w.f32(x);
  w.u8(hnsw ? 1 : 0);
  if (hnsw) {
    const auto& g = *hnsw;
    w.u32(static_cast<std::uint32_t>(g.params_.M));
    w.u32(static_cast<std::uint32_t>(g.params_.ef_construction));
    w.u32(static_cast<std::uint32_t>(g.params_.ef_search));
    w.u64(g.params_.seed);
    w.u32(g.entry_);
    w.u32(static_cast<std::uint32_t>(g.max_level_));
    for (const auto& node : g.links_) {
      w.u8(static_cast<std::uint8_t>(node.size() - 1));
      for (const auto& layer : node) {
        w.u32(static_cast<std::uint32_t>(layer.size()));
        for (auto n : layer) w.u32(n);
      }
    }
  }
  return w.data();
}

Index Index::deserialize(std::string bytes) {
  BinaryReader in(std::move(bytes));
  expect_header(in, kMagic, kVersion);
  Index idx;
  auto& v = idx.vectors;
  v.dim_ = in.u32();
  const auto count = in.u64();
  const auto metric = in.u8();
  if (metric != kMetricInnerProduct) throw FormatError("unknown index metric tag");
  if (v.dim_ == 0 || count == 0) throw FormatError("index header has zero dimensions");
  in.need(count * 4);
  v.ids_.reserve(count);
  std::unordered_set<std::string> seen;
  for (std::uint64_t i = 0; i < count; ++i) {
    v.ids_.push_back(in.str());
    if (!seen.insert(v.ids_.back()).second) throw FormatError("duplicate doc_id in index file");
  }
  in.need(count * v.dim_ * 4);
  v.data_.resize(count * v.dim_);
  for (auto& x : v.data_) x = in.f32();
  const auto has_graph = in.u8();
  if (has_graph > 1) throw FormatError("bad HNSW section flag");
  if (has_graph) {
    HnswGraph g;
    g.params_.M = in.u32();
    g.params_.ef_construction = in.u32();
    g.params_.ef_search = in.u32();
    g.params_.seed = in.u64();
    g.entry_ = in.u32();
    g.max_level_ = in.u32();
    if (g.entry_ >= count) throw FormatError("HNSW entry point out of range");
    g.links_.resize(count);
    for (auto& node : g.links_) {
      const std::size_t lvl = in.u8();
      if (lvl > g.max_level_) throw FormatError("HNSW node level above the graph's top");
      node.resize(lvl + 1);
      for (auto& layer : node) {
        const auto deg = in.u32();
        in.need(static_cast<std::size_t>(deg) * 4);
        layer.resize(deg);
        for (auto& nb : layer) {
          nb = in.u32();
          if (nb >= count) throw FormatError("HNSW neighbor id out of range");
        }
      }
    }
    if (g.links_[g.entry_].size() != g.max_level_ + 1) {
      throw FormatError("HNSW entry point is not on the top layer");
    }
    idx.hnsw = std::move(g);
  }
  if (!in.at_end()) throw FormatError("trailing bytes in index file");
  return idx;
}

void Index::save(const std::filesystem::path& path) const {
  BinaryWriter w;
  w.bytes(serialize());
  w.save(path);
}

Index Index::load(const std::filesystem::path& path) {
  auto in = BinaryReader::from_file(path);
  return deserialize(in.bytes(in.remaining()));
}

double overlap_recall(std::span<const ScoredDoc> approx, std::span<const ScoredDoc> exact) {
  if (exact.empty()) return 1.0;
  std::unordered_set<std::string> truth;
  for (const auto& d : exact) truth.insert(d.doc_id);
  std::size_t hit = 0;
  for (const auto& d : approx) hit += truth.contains(d.doc_id) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(exact.size());
}

}  // namespace uae::index
