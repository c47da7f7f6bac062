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

#include "uae/eval/report.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "uae/common.hpp"

namespace uae::eval {

RunRanking to_ranking(const ScoredRun& scored) {
  RunRanking run;
  for (const auto& [qid, docs] : scored) {
    auto sorted = docs;
    sort_ranked(sorted);
    auto& out = run[qid];
    for (const auto& d : sorted) out.push_back(d.doc_id);
  }
  return run;
}

MethodMetrics evaluate_method(const std::string& name, const ScoredRun& scored,
                              const Judgments& judgments, const EvalOptions& opts) {
  MethodMetrics m;
  m.name = name;
  const auto run = to_ranking(scored);
  std::set<std::string> flagged;
  for (auto k : opts.k_list) {
    auto r = recall_at_k(run, judgments, k);
    m.recall[k] = r.value;
    m.per_query["R@" + std::to_string(k)] = std::move(r.per_query);
    flagged.insert(r.flagged.begin(), r.flagged.end());
  }
  auto ap = mean_average_precision(run, judgments);
  m.map = ap.value;
  m.per_query["MAP"] = std::move(ap.per_query);
  flagged.insert(ap.flagged.begin(), ap.flagged.end());

  auto eu = exp_util_at_1(run, judgments);
  m.exp_util_at_1 = eu.value;
  m.per_query["ExpUtil@1"] = std::move(eu.per_query);

  double ndcg_sum = 0.0, pair_sum = 0.0;
  std::size_t ndcg_n = 0, pair_n = 0;
  for (const auto& [qid, docs] : scored) {
    std::vector<PoolEntry> pool;
    bool complete = true;
    for (const auto& d : docs) {
      auto u = judgments.utility_of(qid, d.doc_id);
      if (!u) {
        complete = false;
        break;
      }
      pool.push_back({d.doc_id, d.score, *u});
    }
    if (!complete) continue;
    if (auto n = ndcg_at_1(pool)) {
      ndcg_sum += *n;
      ++ndcg_n;
      m.per_query["NDCG@1"][qid] = *n;
    } else {
      flagged.insert(qid);
    }
    if (auto p = pairwise_accuracy(pool, opts.min_gap)) {
      pair_sum += *p;
      ++pair_n;
      m.per_query["pairwise_accuracy"][qid] = *p;
    }
  }
  if (ndcg_n) m.ndcg_at_1 = ndcg_sum / static_cast<double>(ndcg_n);
  if (pair_n) m.pairwise_accuracy = pair_sum / static_cast<double>(pair_n);
  m.flagged.assign(flagged.begin(), flagged.end());
  return m;
}

void attach_generation(MethodMetrics& m, const GenerationResult& g) {
  m.gen_f1 = g.gen_f1;
  m.rouge_l = g.rouge_l;
  m.per_query["Gen-F1"] = g.per_query_f1;
  m.per_query["ROUGE-L"] = g.per_query_rouge;
  m.flagged.insert(m.flagged.end(), g.flagged.begin(), g.flagged.end());
}

const MethodMetrics& EvalReport::method(const std::string& name) const {
  for (const auto& m : methods) {
    if (m.name == name) return m;
  }
  throw ValidationError("no method \"" + name + "\" in report");
}

namespace {

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json stats_json(const LatencyStats& s) {
  return {{"median_ms", s.median_ms}, {"mean_ms", s.mean_ms}, {"p95_ms", s.p95_ms},
          {"samples", s.samples}};
}

std::string csv_opt(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(10);
  os << *v;
  return os.str();
}

const LatencyStats* path_stats(const EvalReport& r, const std::string& method) {
  if (!r.latency) return nullptr;
  auto it = r.latency_path.find(method);
  if (it == r.latency_path.end()) return nullptr;
  if (it->second == "index") return &r.latency->index_path;
  if (it->second == "rerank") return &r.latency->rerank_path;
  return nullptr;
}

}  // namespace

std::string report_json(const EvalReport& r, bool per_query) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["queries"] = r.queries;
  j["relevance"] = r.relevance;
  j["threshold"] = r.threshold;
  auto& methods = j["methods"];
  methods = nlohmann::ordered_json::object();
  for (const auto& m : r.methods) {
    nlohmann::ordered_json mj;
    for (const auto& [k, v] : m.recall) mj["R@" + std::to_string(k)] = v;
    mj["MAP"] = m.map;
    mj["NDCG@1"] = opt_json(m.ndcg_at_1);
    mj["ExpUtil@1"] = m.exp_util_at_1;
    mj["pairwise_accuracy"] = opt_json(m.pairwise_accuracy);
    mj["Gen-F1"] = opt_json(m.gen_f1);
    mj["ROUGE-L"] = opt_json(m.rouge_l);
    mj["flagged"] = m.flagged;
    if (per_query) mj["per_query"] = m.per_query;
    methods[m.name] = std::move(mj);
  }
  if (r.latency) {
    const auto& l = *r.latency;
    j["latency"] = {{"index_path", stats_json(l.index_path)},
                    {"rerank_path", stats_json(l.rerank_path)},
                    {"speedup", l.speedup},
                    {"rerank_evals_per_query", l.rerank_evals_per_query},
                    {"queries", l.queries},
                    {"repetitions", l.repetitions},
                    {"method_paths", r.latency_path}};
  }
  return j.dump(2);
}

void write_report_json(const std::filesystem::path& path, const EvalReport& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << report_json(r) << '\n';
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  std::set<std::size_t> ks;
  for (const auto& m : r.methods) {
    for (const auto& [k, _] : m.recall) ks.insert(k);
  }
  out << "method,path";
  for (auto k : ks) out << ",R@" << k;
  out << ",MAP,NDCG@1,ExpUtil@1,pairwise_accuracy,Gen-F1,ROUGE-L,"
         "latency_median_ms,latency_mean_ms,latency_p95_ms\n";
  for (const auto& m : r.methods) {
    auto it = r.latency_path.find(m.name);
    out << m.name << ',' << (it == r.latency_path.end() ? "" : it->second);
    for (auto k : ks) {
      auto v = m.recall.find(k);
      out << ',' << (v == m.recall.end() ? "" : csv_opt(v->second));
    }
    out << ',' << csv_opt(m.map) << ',' << csv_opt(m.ndcg_at_1) << ','
        << csv_opt(m.exp_util_at_1) << ',' << csv_opt(m.pairwise_accuracy) << ','
        << csv_opt(m.gen_f1) << ',' << csv_opt(m.rouge_l);
    if (const auto* s = path_stats(r, m.name)) {
      out << ',' << csv_opt(s->median_ms) << ',' << csv_opt(s->mean_ms) << ','
          << csv_opt(s->p95_ms);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

void write_efficiency_csv(const std::filesystem::path& path, const EvalReport& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "method,metric,latency_ms\n";
  for (const auto& m : r.methods) {
    const auto* s = path_stats(r, m.name);
    if (!s) continue;
    auto r1 = m.recall.find(1);
    const std::optional<double> metric =
        r1 == m.recall.end() ? std::nullopt : std::optional<double>(r1->second);
    out << m.name << ',' << csv_opt(metric) << ',' << csv_opt(s->median_ms) << '\n';
  }
}

void write_run(const std::filesystem::path& path, const RunRanking& run) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (const auto& [qid, ranked] : run) {
    nlohmann::ordered_json j{{"query_id", qid}, {"ranked_doc_ids", ranked}};
    out << j.dump() << '\n';
  }
}

RunRanking read_run(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  RunRanking run;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    try {
      auto j = nlohmann::json::parse(line);
      const auto qid = j.at("query_id").get<std::string>();
      auto ranked = j.at("ranked_doc_ids").get<std::vector<std::string>>();
      std::set<std::string> uniq(ranked.begin(), ranked.end());
      if (uniq.size() != ranked.size()) throw IngestError("duplicate doc_id in ranking", lineno);
      if (!run.emplace(qid, std::move(ranked)).second) {
        throw IngestError("duplicate query_id \"" + qid + "\"", lineno);
      }
    } catch (const nlohmann::json::exception& e) {
      throw IngestError(path.filename().string() + ": " + e.what(), lineno);
    }
  }
  return run;
}

}  // namespace uae::eval
