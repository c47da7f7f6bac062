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

#include "uae/retriever/distill.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "uae/optim.hpp"

namespace uae::retriever {

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    z += p[i];
  }
  for (auto& x : p) x /= z;
  return p;
}

std::vector<double> target_distribution(std::span<const double> rewards, double lambda,
                                        bool standardize) {
  if (rewards.size() < 2) throw ValidationError("target distribution needs >= 2 rewards");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  for (double r : rewards) {
    if (!std::isfinite(r)) throw ValidationError("non-finite reward");
  }
  std::vector<double> r(rewards.begin(), rewards.end());
  if (standardize) {
    const double n = static_cast<double>(r.size());
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
    double var = 0.0;
    for (double x : r) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / n);
    for (auto& x : r) x = sd > 0.0 ? (x - mean) / sd : 0.0;
  }
  for (auto& x : r) x *= lambda;
  return softmax(r);
}

std::vector<double> student_distribution(std::span<const double> q,
                                         std::span<const std::vector<double>> docs,
                                         double tau) {
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
  std::vector<double> logits;
  logits.reserve(docs.size());
  for (const auto& d : docs) logits.push_back(dot(q, d) / tau);
  return softmax(logits);
}

double uae_loss(std::span<const double> target, std::span<const double> student) {
  if (target.size() != student.size()) {
    throw ValidationError("target and student distributions differ in length");
  }
  double l = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] != 0.0) l -= target[i] * std::log(std::max(student[i], kProbFloor));
  }
  return l;
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

double kl_divergence(std::span<const double> target, std::span<const double> student) {
  return uae_loss(target, student) - entropy(target);
}

double distill_objective(const BiEncoder& enc, const DistillBatch& batch, double tau,
                         double weight_decay, std::span<double> grad, DistillStats* stats) {
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
  if (batch.queries.empty()) throw ValidationError("empty distillation batch");
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t dim = enc.dim();

  std::vector<BiEncoder::Cache> doc_cache(batch.docs.size());
  for (std::size_t i = 0; i < batch.docs.size(); ++i) enc.forward(batch.docs[i], doc_cache[i]);
  std::vector<std::vector<double>> doc_dy;
  if (want_grad) doc_dy.assign(batch.docs.size(), std::vector<double>(dim, 0.0));

  const double inv_b = 1.0 / static_cast<double>(batch.queries.size());
  double loss_sum = 0.0, kl_sum = 0.0;
  BiEncoder::Cache qc;
  std::vector<double> q_dy(dim);
  for (std::size_t qi = 0; qi < batch.queries.size(); ++qi) {
    const auto& cand = batch.candidates[qi];
    const auto& target = batch.targets[qi];
    if (cand.size() != target.size() || cand.size() < 2) {
      throw ValidationError("candidate set and target must match and hold >= 2 entries");
    }
    enc.forward(batch.queries[qi], qc);
    std::vector<double> logits(cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i) {
      logits[i] = dot(qc.y, doc_cache[cand[i]].y) / tau;
    }
    const auto p = softmax(logits);
    const double l = uae_loss(target, p);
    loss_sum += l;
    kl_sum += l - entropy(target);
    if (!want_grad) continue;

    // d/ds_j of -sum_i t_i log max(p_i, floor); floored terms are constant.
    double live_mass = 0.0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (p[i] >= kProbFloor) live_mass += target[i];
    }
    std::fill(q_dy.begin(), q_dy.end(), 0.0);
    for (std::size_t j = 0; j < cand.size(); ++j) {
      const double live_t = p[j] >= kProbFloor ? target[j] : 0.0;
      const double ds = (p[j] * live_mass - live_t) * inv_b / tau;
      if (ds == 0.0) continue;
      const auto& dv = doc_cache[cand[j]].y;
      auto& ddy = doc_dy[cand[j]];
      for (std::size_t k = 0; k < dim; ++k) {
        q_dy[k] += ds * dv[k];
        ddy[k] += ds * qc.y[k];
      }
    }
    enc.backward(batch.queries[qi], qc, q_dy, grad);
  }
  if (want_grad) {
    for (std::size_t i = 0; i < batch.docs.size(); ++i) {
      enc.backward(batch.docs[i], doc_cache[i], doc_dy[i], grad);
    }
  }

  double reg = 0.0;
  if (weight_decay != 0.0) {
    const auto theta = enc.params();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      reg += theta[i] * theta[i];
      if (want_grad) grad[i] += weight_decay * theta[i];
    }
    reg *= 0.5 * weight_decay;
  }
  if (stats) {
    stats->mean_loss = loss_sum * inv_b;
    stats->mean_kl = kl_sum * inv_b;
  }
  return loss_sum * inv_b + reg;
}

std::vector<double> example_target(const DistillExample& ex, const DistillCfg& cfg) {
  if (cfg.target == TargetKind::OneHot) {
    std::vector<double> t(ex.doc_ids.size(), 0.0);
    t.at(0) = 1.0;
    return t;
  }
  return target_distribution(ex.rewards, cfg.lambda, cfg.standardize);
}

DistillResult train_distill(const data::Dataset& ds, std::span<const DistillExample> examples,
                            const DistillCfg& cfg) {
  BiEncoder init(ds.tokenizer().size(), cfg.dim, derive_seed(cfg.seed, "encoder-init"));
  return train_distill(std::move(init), ds, examples, cfg);
}

DistillResult train_distill(BiEncoder init, const data::Dataset& ds,
                            std::span<const DistillExample> examples, const DistillCfg& cfg) {
  if (examples.empty()) throw ValidationError("no distillation examples");
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(cfg.tau > 0.0)) throw ConfigError("tau must be > 0");
  if (!(cfg.lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (init.vocab_size() != ds.tokenizer().size()) {
    throw ConfigError("encoder vocabulary does not match the dataset");
  }

  std::vector<std::vector<double>> targets;
  std::vector<std::vector<std::size_t>> doc_idx;
  for (const auto& ex : examples) {
    if (ex.doc_ids.size() < 2) {
      throw ValidationError("query \"" + ex.query_id + "\" has no negatives");
    }
    if (ex.rewards.size() != ex.doc_ids.size()) {
      throw ValidationError("query \"" + ex.query_id + "\" has mismatched rewards");
    }
    targets.push_back(example_target(ex, cfg));
    std::vector<std::size_t> idx;
    for (const auto& id : ex.doc_ids) idx.push_back(ds.doc_index(id));
    doc_idx.push_back(std::move(idx));
  }

  DistillResult result{std::move(init), {}};
  auto& enc = result.encoder;
  Adam opt(enc.num_params(), {.lr = cfg.lr});
  std::vector<double> grad(enc.num_params());
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(cfg.seed, "distill-shuffle"));
  const auto docs = ds.documents();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0, kl_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const auto end = std::min(order.size(), start + cfg.batch_size);
      DistillBatch batch;
      std::map<std::size_t, std::size_t> slot;
      std::vector<std::size_t> slot_doc;
      auto slot_of = [&](std::size_t d) {
        auto [it, fresh] = slot.emplace(d, batch.docs.size());
        if (fresh) {
          batch.docs.push_back(docs[d].tokens);
          slot_doc.push_back(d);
        }
        return it->second;
      };
      for (std::size_t i = start; i < end; ++i) {
        for (auto d : doc_idx[order[i]]) slot_of(d);
      }
      for (std::size_t i = start; i < end; ++i) {
        const auto ex = order[i];
        batch.queries.push_back(ds.query(examples[ex].query_id).question_tokens);
        std::vector<std::size_t> cand;
        for (auto d : doc_idx[ex]) cand.push_back(slot.at(d));
        auto target = targets[ex];
        if (cfg.cross_query) {
          const std::set<std::size_t> own(cand.begin(), cand.end());
          const auto& q = ds.query(examples[ex].query_id);
          const std::set<std::string> golds(q.gold_doc_ids.begin(), q.gold_doc_ids.end());
          for (std::size_t s = 0; s < batch.docs.size(); ++s) {
            if (own.contains(s) || golds.contains(docs[slot_doc[s]].doc_id)) continue;
            cand.push_back(s);
            target.push_back(0.0);
          }
        }
        batch.candidates.push_back(std::move(cand));
        batch.targets.push_back(std::move(target));
      }

      DistillStats stats;
      const double loss = distill_objective(enc, batch, cfg.tau, cfg.weight_decay, grad, &stats);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite distillation loss at epoch " << epoch << ", step " << steps
            << "; queries:";
        for (std::size_t i = start; i < end; ++i) msg << ' ' << examples[order[i]].query_id;
        throw TrainingError(msg.str());
      }
      opt.step(enc.params(), grad);
      loss_sum += stats.mean_loss;
      kl_sum += stats.mean_kl;
      ++steps;
    }
    result.trace.push_back({epoch + 1, loss_sum / static_cast<double>(steps),
                            kl_sum / static_cast<double>(steps)});
  }
  return result;
}

DistillExample make_example(const data::Dataset& ds, const std::string& query_id,
                            const std::vector<std::string>& negatives,
                            const reward::PairScorer& reward) {
  const auto& q = ds.query(query_id);
  if (q.gold_doc_ids.empty()) throw ValidationError("query \"" + query_id + "\" has no gold");
  DistillExample ex{query_id, {q.gold_doc_ids.front()}, {}};
  for (const auto& n : negatives) ex.doc_ids.push_back(n);
  for (const auto& id : ex.doc_ids) ex.rewards.push_back(reward(q, ds.doc(id)));
  return ex;
}

std::vector<std::string> random_negatives(const data::Dataset& ds, const data::QaExample& q,
                                          std::size_t m, std::uint64_t seed) {
  const auto docs = ds.documents();
  const std::set<std::string> golds(q.gold_doc_ids.begin(), q.gold_doc_ids.end());
  if (docs.size() < golds.size() + m) throw ValidationError("corpus too small for m negatives");
  std::mt19937_64 rng(splitmix64(seed ^ fnv1a64(q.query_id)));
  std::uniform_int_distribution<std::size_t> pick(0, docs.size() - 1);
  std::set<std::string> chosen;
  std::vector<std::string> out;
  while (out.size() < m) {
    const auto& id = docs[pick(rng)].doc_id;
    if (golds.contains(id) || !chosen.insert(id).second) continue;
    out.push_back(id);
  }
  return out;
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out.precision(17);
  out << "epoch,mean_loss,mean_kl\n";
  for (const auto& r : trace) out << r.epoch << ',' << r.mean_loss << ',' << r.mean_kl << '\n';
}

}  // namespace uae::retriever
