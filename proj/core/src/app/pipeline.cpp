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

#include "uae/app/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "uae/app/service.hpp"
#include "uae/miner/bm25.hpp"
#include "uae/oracle/scoring.hpp"
#include "uae/retriever/bi_encoder.hpp"

namespace uae::app {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void require_file(const fs::path& p) {
  if (!fs::exists(p)) throw MissingInputError(p.string());
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error("cannot create directory " + p.string() + ": " + ec.message());
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + p.string());
  out << text;
  if (!out) throw Error("write failed: " + p.string());
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw MissingInputError(p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

data::LoadOptions load_options(const PipelineConfig& cfg) {
  data::LoadOptions o;
  o.pool_size = cfg.data.pool_size;
  o.min_freq = cfg.data.min_freq;
  return o;
}

data::Dataset load_dataset(const PipelineConfig& cfg) {
  require_file(cfg.paths.corpus_path());
  require_file(cfg.paths.queries_path());
  require_file(cfg.paths.pools_path());
  return data::Dataset::load(cfg.paths.corpus_path(), cfg.paths.queries_path(),
                             cfg.paths.pools_path(), load_options(cfg));
}

// The manifest plus the dataset it describes, checked against each other.
struct Context {
  Manifest manifest;
  data::Dataset ds;
};

Context load_context(const PipelineConfig& cfg) {
  auto m = read_manifest(cfg.paths.artifact("manifest.json"));
  auto ds = load_dataset(cfg);
  if (ds.documents().size() != m.num_docs || ds.queries().size() != m.num_queries ||
      ds.tokenizer().size() != m.vocab_size) {
    throw ValidationError("dataset no longer matches manifest.json; re-run ingest");
  }
  return {std::move(m), std::move(ds)};
}

std::vector<oracle::UtilityRecord> load_utilities(const PipelineConfig& cfg) {
  const auto p = cfg.paths.artifact("utilities.jsonl");
  require_file(p);
  return oracle::read_utilities(p);
}

reward::RewardScorer load_reward(const PipelineConfig& cfg, const data::Dataset& ds) {
  const auto p = cfg.paths.artifact("reward.bin");
  require_file(p);
  auto scorer = reward::RewardScorer::load(p);
  if (scorer.dims().vocab_size != ds.tokenizer().size()) {
    throw ValidationError("reward.bin vocabulary does not match the dataset; re-run train-reward");
  }
  return scorer;
}

retriever::BiEncoder load_encoder(const fs::path& p, const data::Dataset& ds) {
  require_file(p);
  auto loaded = retriever::BiEncoder::load(p);
  if (loaded.encoder.vocab_size() != ds.tokenizer().size()) {
    throw ValidationError(p.filename().string() +
                          " vocabulary does not match the dataset; re-run train-retriever");
  }
  return std::move(loaded.encoder);
}

eval::ScoredRun score_pools_with(const data::Dataset& ds, std::span<const std::string> qids,
                                 const std::function<double(const data::QaExample&,
                                                            const data::Document&)>& score) {
  eval::ScoredRun run;
  for (const auto& qid : qids) {
    const auto& q = ds.query(qid);
    auto& out = run[qid];
    for (const auto& d : ds.pool(qid).doc_ids) out.push_back({d, score(q, ds.doc(d))});
  }
  return run;
}

eval::ScoredRun encoder_run(const data::Dataset& ds, std::span<const std::string> qids,
                            const retriever::BiEncoder& enc) {
  std::map<std::string, std::vector<double>> doc_vec;
  eval::ScoredRun run;
  for (const auto& qid : qids) {
    const auto& q = ds.query(qid);
    const auto qv = enc.encode(q.question_tokens);
    auto& out = run[qid];
    for (const auto& d : ds.pool(qid).doc_ids) {
      auto it = doc_vec.find(d);
      if (it == doc_vec.end()) it = doc_vec.emplace(d, enc.encode(ds.doc(d).tokens)).first;
      out.push_back({d, retriever::dot(qv, it->second)});
    }
  }
  return run;
}

eval::LatencyReport measure_latency(const PipelineConfig& cfg, const Context& ctx,
                                    const RetrievalService& service,
                                    const reward::RewardScorer& scorer) {
  const auto& ids = ctx.manifest.test_query_ids;
  const std::size_t n = cfg.eval.latency_queries;
  std::vector<const data::QaExample*> qs;
  for (std::size_t i = 0; i < n; ++i) qs.push_back(&ctx.ds.query(ids[i % ids.size()]));
  const auto& tok = ctx.ds.tokenizer();
  eval::LatencyPaths paths;
  paths.index_path = [&](std::size_t i) {
    auto r = service.retrieve(qs[i]->question, 10);
    if (r.results.empty()) throw Error("index path returned nothing");
  };
  paths.rerank_path = [&](std::size_t i) {
    const auto q = tok.tokenize(qs[i]->question);
    std::vector<ScoredDoc> scored;
    for (const auto& d : ctx.ds.pool(qs[i]->query_id).doc_ids) {
      scored.push_back({d, scorer.score(q, ctx.ds.doc(d).tokens)});
    }
    sort_ranked(scored);
    return scored.size();
  };
  return eval::latency_bench(paths, n, cfg.eval.latency_repetitions, cfg.eval.latency_warmup);
}

ordered_json latency_json(const eval::LatencyReport& l) {
  auto stats = [](const eval::LatencyStats& s) {
    return ordered_json{{"median_ms", s.median_ms},
                        {"mean_ms", s.mean_ms},
                        {"p95_ms", s.p95_ms},
                        {"samples", s.samples}};
  };
  return {{"index_path", stats(l.index_path)},
          {"rerank_path", stats(l.rerank_path)},
          {"speedup", l.speedup},
          {"rerank_evals_per_query", l.rerank_evals_per_query},
          {"queries", l.queries},
          {"repetitions", l.repetitions}};
}

}  // namespace

void write_manifest(const fs::path& path, const Manifest& m) {
  ordered_json j{{"schema_version", m.schema_version},
                 {"seed", m.seed},
                 {"corpus", m.corpus},
                 {"queries", m.queries},
                 {"pools", m.pools},
                 {"num_docs", m.num_docs},
                 {"num_queries", m.num_queries},
                 {"pool_size", m.pool_size},
                 {"vocab_size", m.vocab_size},
                 {"test_fraction", m.test_fraction},
                 {"split", {{"train", m.train_query_ids}, {"test", m.test_query_ids}}}};
  write_text(path, j.dump(2) + "\n");
}

Manifest read_manifest(const fs::path& path) {
  const auto text = read_text(path);
  Manifest m;
  try {
    const auto j = json::parse(text);
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kSchemaVersion) {
      throw FormatError(path.string() + ": unsupported schema_version " +
                        std::to_string(m.schema_version));
    }
    m.seed = j.at("seed").get<std::uint64_t>();
    m.corpus = j.at("corpus").get<std::string>();
    m.queries = j.at("queries").get<std::string>();
    m.pools = j.at("pools").get<std::string>();
    m.num_docs = j.at("num_docs").get<std::size_t>();
    m.num_queries = j.at("num_queries").get<std::size_t>();
    m.pool_size = j.at("pool_size").get<std::size_t>();
    m.vocab_size = j.at("vocab_size").get<std::size_t>();
    m.test_fraction = j.at("test_fraction").get<double>();
    m.train_query_ids = j.at("split").at("train").get<std::vector<std::string>>();
    m.test_query_ids = j.at("split").at("test").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return m;
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_queries(
    const data::Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must be in (0, 1)");
  }
  std::vector<std::string> ids;
  for (const auto& q : ds.queries()) ids.push_back(q.query_id);
  std::sort(ids.begin(), ids.end());
  std::mt19937_64 rng(derive_seed(seed, "split"));
  std::shuffle(ids.begin(), ids.end(), rng);
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(ids.size())));
  if (ids.size() >= 2) n_test = std::clamp<std::size_t>(n_test, 1, ids.size() - 1);
  std::vector<std::string> test(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::string> train(ids.begin() + static_cast<std::ptrdiff_t>(n_test), ids.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

oracle::Generator train_oracle(const data::Dataset& ds, const Manifest& m,
                               const PipelineConfig& cfg) {
  const auto corpus = oracle::oracle_training_corpus(ds, m.train_query_ids);
  return oracle::Generator::train(corpus, ds.tokenizer().size(), cfg.oracle.model);
}

void run_synth(const PipelineConfig& cfg) {
  auto spec = cfg.synth;
  spec.seed = cfg.seed;
  auto syn = generate_synthetic(spec);
  data::LoadOptions opts = load_options(cfg);
  opts.pool_size = spec.pool_size;
  const auto ds = data::Dataset::build(std::move(syn.corpus), std::move(syn.queries),
                                       std::move(syn.pools), opts);
  ensure_dir(cfg.paths.data_dir);
  for (const auto& p : {cfg.paths.corpus_path(), cfg.paths.queries_path(), cfg.paths.pools_path()}) {
    if (p.has_parent_path()) ensure_dir(p.parent_path());
  }
  ds.write(cfg.paths.corpus_path(), cfg.paths.queries_path(), cfg.paths.pools_path());
}

Manifest run_ingest(const PipelineConfig& cfg) {
  const auto ds = load_dataset(cfg);
  Manifest m;
  m.seed = cfg.seed;
  m.corpus = cfg.paths.corpus_path().string();
  m.queries = cfg.paths.queries_path().string();
  m.pools = cfg.paths.pools_path().string();
  m.num_docs = ds.documents().size();
  m.num_queries = ds.queries().size();
  m.pool_size = ds.pool_size();
  m.vocab_size = ds.tokenizer().size();
  m.test_fraction = cfg.data.test_fraction;
  std::tie(m.train_query_ids, m.test_query_ids) =
      split_queries(ds, cfg.data.test_fraction, cfg.seed);
  ensure_dir(cfg.paths.artifacts_dir);
  write_manifest(cfg.paths.artifact("manifest.json"), m);
  return m;
}

std::vector<oracle::UtilityRecord> run_score_utility(const PipelineConfig& cfg) {
  const auto ctx = load_context(cfg);
  const auto gen = train_oracle(ctx.ds, ctx.manifest, cfg);
  const oracle::NoiseConfig noise{cfg.oracle.noise_sigma, derive_seed(cfg.seed, "oracle-noise")};
  auto records = oracle::score_pools(gen, ctx.ds, noise);
  oracle::write_utilities(cfg.paths.artifact("utilities.jsonl"), records);
  std::vector<double> values;
  for (const auto& r : records) values.push_back(r.utility);
  oracle::write_histogram_csv(cfg.paths.artifact("utility_hist.csv"),
                              oracle::histogram(values, cfg.oracle.histogram_bins));
  return records;
}

reward::RewardValidation run_train_reward(const PipelineConfig& cfg) {
  const auto ctx = load_context(cfg);
  const auto records = load_utilities(cfg);
  const std::set<std::string> train(ctx.manifest.train_query_ids.begin(),
                                    ctx.manifest.train_query_ids.end());
  std::vector<oracle::UtilityRecord> train_records;
  for (const auto& r : records) {
    if (train.contains(r.query_id)) train_records.push_back(r);
  }
  const auto quads = reward::build_quadruplets(train_records, cfg.reward);
  auto trained = reward::train_reward(ctx.ds, quads.quads, cfg.reward);
  const auto& scorer = trained.scorer;
  scorer.save(cfg.paths.artifact("reward.bin"));

  std::vector<reward::RewardRecord> rewards;
  for (const auto& pool : ctx.ds.pools()) {
    const auto& q = ctx.ds.query(pool.query_id);
    for (const auto& d : pool.doc_ids) {
      rewards.push_back({pool.query_id, d, scorer.score(q.question_tokens, ctx.ds.doc(d).tokens)});
    }
  }
  reward::write_rewards(cfg.paths.artifact("rewards.jsonl"), rewards);

  const auto table = reward::utility_table(records);
  const auto& test = ctx.manifest.test_query_ids;
  const auto v = reward::validate_reward(reward::as_pair_scorer(scorer), ctx.ds, test, table,
                                         cfg.reward.min_gap);
  const auto bm = miner::Bm25Index::build(ctx.ds.documents());
  const reward::PairScorer bm_scorer = [&bm](const data::QaExample& q, const data::Document& d) {
    return bm.score(q.question_tokens, d.doc_id);
  };
  const auto vb = reward::validate_reward(bm_scorer, ctx.ds, test, table, cfg.reward.min_gap);
  auto block = [](const reward::RewardValidation& x) {
    return ordered_json{{"ndcg_at_1", x.ndcg_at_1},
                        {"pairwise_accuracy", x.pairwise_accuracy},
                        {"ndcg_queries", x.ndcg_queries},
                        {"pairwise_queries", x.pairwise_queries},
                        {"skipped", x.skipped}};
  };
  ordered_json j{{"schema_version", kSchemaVersion},
                 {"quadruplets", quads.quads.size()},
                 {"skipped_queries", quads.skipped_queries},
                 {"epoch_loss", trained.epoch_loss},
                 {"held_out", {{"reward", block(v)}, {"bm25", block(vb)}}}};
  write_text(cfg.paths.artifact("reward_validation.json"), j.dump(2) + "\n");
  return v;
}

miner::MiningReport run_mine(const PipelineConfig& cfg) {
  const auto ctx = load_context(cfg);
  const auto scorer = load_reward(cfg, ctx.ds);
  const auto bm = miner::Bm25Index::build(ctx.ds.documents());
  const auto result =
      miner::mine_all(ctx.ds, ctx.manifest.train_query_ids, reward::as_pair_scorer(scorer),
                      miner::bm25_ranker(bm), cfg.miner.gate, cfg.miner.threads);
  miner::write_negatives(cfg.paths.artifact("negatives.jsonl"), result.negatives);
  miner::write_mining_report(cfg.paths.artifact("mining_report.json"), result.report);
  return result.report;
}

void run_train_retriever(const PipelineConfig& cfg) {
  const auto ctx = load_context(cfg);
  const auto scorer = load_reward(cfg, ctx.ds);
  const auto neg_path = cfg.paths.artifact("negatives.jsonl");
  require_file(neg_path);
  const auto negatives = miner::read_negatives(neg_path);
  const auto rs = reward::as_pair_scorer(scorer);

  std::vector<retriever::DistillExample> uae, infonce;
  for (const auto& n : negatives) {
    uae.push_back(retriever::make_example(ctx.ds, n.query_id, n.negative_doc_ids, rs));
  }
  const auto neg_seed = derive_seed(cfg.seed, "infonce-negatives");
  for (const auto& qid : ctx.manifest.train_query_ids) {
    const auto rn = retriever::random_negatives(ctx.ds, ctx.ds.query(qid), cfg.miner.gate.m, neg_seed);
    infonce.push_back(retriever::make_example(ctx.ds, qid, rn, rs));
  }

  auto dc = cfg.distill;
  dc.seed = cfg.seed;
  dc.target = retriever::TargetKind::Uae;
  const auto u = retriever::train_distill(ctx.ds, uae, dc);
  u.encoder.save(cfg.paths.artifact("encoder.bin"), &ctx.ds.tokenizer());
  retriever::write_trace_csv(cfg.paths.artifact("training_trace.csv"), u.trace);

  dc.target = retriever::TargetKind::OneHot;
  const auto b = retriever::train_distill(ctx.ds, infonce, dc);
  b.encoder.save(cfg.paths.artifact("encoder_infonce.bin"), &ctx.ds.tokenizer());
  retriever::write_trace_csv(cfg.paths.artifact("training_trace_infonce.csv"), b.trace);
}

void run_build_index(const PipelineConfig& cfg) {
  const auto enc_path = cfg.paths.artifact("encoder.bin");
  require_file(enc_path);
  const auto corpus = cfg.paths.corpus_path();
  require_file(corpus);
  auto loaded = retriever::BiEncoder::load(enc_path);
  if (!loaded.tokenizer) throw FormatError(enc_path.string() + " has no vocabulary section");
  std::ifstream in(corpus);
  const auto docs = data::parse_corpus(in);
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  rows.reserve(docs.size());
  for (const auto& d : docs) {
    const auto tokens = loaded.tokenizer->tokenize(d.text);
    if (tokens.empty()) throw IngestError("document " + d.doc_id + " has no tokens", 0);
    rows.emplace_back(d.doc_id, loaded.encoder.encode(tokens));
  }
  index::Index idx;
  idx.vectors = index::VectorIndex::build(rows);
  if (cfg.index.hnsw) idx.hnsw = index::HnswGraph::build(idx.vectors, cfg.index.params);
  ensure_dir(cfg.paths.artifacts_dir);
  idx.save(cfg.paths.artifact("index.bin"));
}

eval::RunRanking run_retrieve(const PipelineConfig& cfg, std::size_t k) {
  const auto ctx = load_context(cfg);
  const auto service =
      RetrievalService::load(cfg.paths.artifact("encoder.bin"), cfg.paths.artifact("index.bin"));
  eval::RunRanking run;
  for (const auto& qid : ctx.manifest.test_query_ids) {
    auto& ranked = run[qid];
    for (const auto& d : service.retrieve(ctx.ds.query(qid).question, k).results) {
      ranked.push_back(d.doc_id);
    }
  }
  eval::write_run(cfg.paths.artifact("run.jsonl"), run);
  return run;
}

eval::EvalReport run_evaluate(const PipelineConfig& cfg) {
  const auto ctx = load_context(cfg);
  const auto& ds = ctx.ds;
  const auto& test = ctx.manifest.test_query_ids;
  const auto records = load_utilities(cfg);
  const auto table = reward::utility_table(records);
  const auto scorer = load_reward(cfg, ds);
  const auto uae_enc = load_encoder(cfg.paths.artifact("encoder.bin"), ds);
  const auto infonce_enc = load_encoder(cfg.paths.artifact("encoder_infonce.bin"), ds);
  const auto service =
      RetrievalService::load(cfg.paths.artifact("encoder.bin"), cfg.paths.artifact("index.bin"));
  const auto bm = miner::Bm25Index::build(ds.documents());

  eval::Judgments j;
  j.threshold_relevance = cfg.eval.relevance == "threshold";
  j.threshold = cfg.eval.threshold;
  for (const auto& qid : test) {
    const auto& q = ds.query(qid);
    j.gold[qid] = std::set<std::string>(q.gold_doc_ids.begin(), q.gold_doc_ids.end());
    auto it = table.find(qid);
    if (it == table.end()) throw ValidationError("utilities.jsonl has no records for " + qid);
    j.utility[qid] = it->second;
  }

  std::vector<std::pair<std::string, eval::ScoredRun>> runs;
  runs.emplace_back("bm25", score_pools_with(ds, test, [&](const auto& q, const auto& d) {
                      return bm.score(q.question_tokens, d.doc_id);
                    }));
  runs.emplace_back("infonce", encoder_run(ds, test, infonce_enc));
  runs.emplace_back("uae", encoder_run(ds, test, uae_enc));
  runs.emplace_back("reward", score_pools_with(ds, test, [&](const auto& q, const auto& d) {
                      return scorer.score(q.question_tokens, d.tokens);
                    }));

  eval::EvalReport report;
  report.seed = cfg.seed;
  report.queries = test.size();
  report.relevance = cfg.eval.relevance;
  report.threshold = cfg.eval.threshold;
  eval::EvalOptions opts;
  opts.k_list = cfg.eval.k_list;
  opts.min_gap = cfg.eval.min_gap;

  std::optional<oracle::Generator> gen;
  if (cfg.eval.generation) gen = train_oracle(ds, ctx.manifest, cfg);
  for (const auto& [name, run] : runs) {
    auto m = eval::evaluate_method(name, run, j, opts);
    if (gen) {
      eval::attach_generation(
          m, eval::generation_eval(eval::to_ranking(run), *gen, ds, cfg.eval.max_gen_len));
    }
    report.methods.push_back(std::move(m));
  }

  report.latency = measure_latency(cfg, ctx, service, scorer);
  report.latency_path = {{"uae", "index"}, {"reward", "rerank"}};

  eval::write_report_json(cfg.paths.artifact("report.json"), report);
  eval::write_report_csv(cfg.paths.artifact("report.csv"), report);
  eval::write_efficiency_csv(cfg.paths.artifact("efficiency_scatter.csv"), report);
  return report;
}

eval::LatencyReport run_bench(const PipelineConfig& cfg) {
  const auto ctx = load_context(cfg);
  const auto scorer = load_reward(cfg, ctx.ds);
  const auto service =
      RetrievalService::load(cfg.paths.artifact("encoder.bin"), cfg.paths.artifact("index.bin"));
  const auto l = measure_latency(cfg, ctx, service, scorer);
  ordered_json j{{"schema_version", kSchemaVersion},
                 {"index_size", service.size()},
                 {"latency", latency_json(l)}};
  write_text(cfg.paths.artifact("bench.json"), j.dump(2) + "\n");
  return l;
}

eval::EvalReport run_all(const PipelineConfig& cfg, bool force_synth) {
  const bool have_data = fs::exists(cfg.paths.corpus_path()) &&
                         fs::exists(cfg.paths.queries_path()) &&
                         fs::exists(cfg.paths.pools_path());
  if (force_synth || !have_data) run_synth(cfg);
  run_ingest(cfg);
  run_score_utility(cfg);
  run_train_reward(cfg);
  run_mine(cfg);
  run_train_retriever(cfg);
  run_build_index(cfg);
  run_retrieve(cfg, cfg.serve.default_k);
  return run_evaluate(cfg);
}

std::string report_without_latency(const fs::path& report_json) {
  auto j = ordered_json::parse(read_text(report_json));
  j.erase("latency");
  return j.dump();
}

}  // namespace uae::app
