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

#include "cli.hpp"

#include <exception>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "uae/app/config.hpp"
#include "uae/app/pipeline.hpp"
#include "uae/app/server.hpp"
#include "uae/app/service.hpp"

namespace uae::cli {

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> data_dir;
  std::optional<std::string> artifacts_dir;
  // synth
  std::optional<std::size_t> num_docs, num_queries, pool_size;
  // train-reward / train-retriever
  std::optional<std::size_t> reward_epochs, distill_epochs;
  bool cross_query = false;
  // mine
  std::optional<std::string> delta_mode;
  // evaluate
  std::optional<std::string> relevance;
  // retrieve
  std::optional<std::string> question;
  std::optional<std::size_t> k;
  // serve
  std::optional<std::string> host;
  std::optional<int> port;
};

app::PipelineConfig resolve(const Overrides& o) {
  app::PipelineConfig cfg =
      o.config_path.empty() ? app::PipelineConfig{} : app::load_config(o.config_path);
  app::apply_env_overrides(cfg);
  if (o.seed) cfg.seed = *o.seed;
  if (o.data_dir) cfg.paths.data_dir = *o.data_dir;
  if (o.artifacts_dir) cfg.paths.artifacts_dir = *o.artifacts_dir;
  if (o.num_docs) cfg.synth.num_docs = *o.num_docs;
  if (o.num_queries) cfg.synth.num_queries = *o.num_queries;
  if (o.pool_size) cfg.synth.pool_size = cfg.data.pool_size = *o.pool_size;
  if (o.reward_epochs) cfg.reward.epochs = *o.reward_epochs;
  if (o.distill_epochs) cfg.distill.epochs = *o.distill_epochs;
  if (o.cross_query) cfg.distill.cross_query = true;
  if (o.delta_mode) cfg.miner.gate.delta_mode = miner::parse_delta_mode(*o.delta_mode);
  if (o.relevance) cfg.eval.relevance = *o.relevance;
  if (o.host) cfg.serve.host = *o.host;
  if (o.port) cfg.serve.port = *o.port;
  app::propagate_seed(cfg);
  cfg.validate();
  return cfg;
}

nlohmann::ordered_json results_json(const app::RetrievalService::Response& r) {
  nlohmann::ordered_json j;
  j["results"] = nlohmann::ordered_json::array();
  for (const auto& d : r.results) j["results"].push_back({{"doc_id", d.doc_id}, {"score", d.score}});
  j["latency_ms"] = r.latency_ms;
  return j;
}

int run(const std::string& cmd, const Overrides& o, std::ostream& out) {
  const auto cfg = resolve(o);
  if (cmd == "synth") {
    app::run_synth(cfg);
    out << "wrote " << cfg.paths.corpus_path().string() << ", " << cfg.paths.queries_path().string()
        << ", " << cfg.paths.pools_path().string() << "\n";
  } else if (cmd == "ingest") {
    const auto m = app::run_ingest(cfg);
    out << "ingested " << m.num_docs << " documents, " << m.num_queries << " queries ("
        << m.train_query_ids.size() << " train / " << m.test_query_ids.size()
        << " test), vocabulary " << m.vocab_size << "\n";
  } else if (cmd == "score-utility") {
    const auto r = app::run_score_utility(cfg);
    out << "scored " << r.size() << " query-document pairs\n";
  } else if (cmd == "train-reward") {
    const auto v = app::run_train_reward(cfg);
    out << "held-out NDCG@1 " << v.ndcg_at_1 << ", pairwise accuracy " << v.pairwise_accuracy
        << "\n";
  } else if (cmd == "mine") {
    const auto r = app::run_mine(cfg);
    out << "mined " << r.negatives_emitted << " negatives for " << r.queries << " queries ("
        << r.backfilled_queries << " backfilled)\n";
  } else if (cmd == "train-retriever") {
    app::run_train_retriever(cfg);
    out << "wrote " << cfg.paths.artifact("encoder.bin").string() << "\n";
  } else if (cmd == "build-index") {
    app::run_build_index(cfg);
    out << "wrote " << cfg.paths.artifact("index.bin").string() << "\n";
  } else if (cmd == "retrieve") {
    const std::size_t k = o.k.value_or(cfg.serve.default_k);
    if (o.question) {
      const auto service = app::RetrievalService::load(cfg.paths.artifact("encoder.bin"),
                                                       cfg.paths.artifact("index.bin"));
      out << results_json(service.retrieve(*o.question, k)).dump() << "\n";
    } else {
      const auto run = app::run_retrieve(cfg, k);
      out << "wrote " << run.size() << " rankings to " << cfg.paths.artifact("run.jsonl").string()
          << "\n";
    }
  } else if (cmd == "evaluate") {
    const auto rep = app::run_evaluate(cfg);
    for (const auto& m : rep.methods) {
      const auto k = cfg.eval.k_list.front();
      out << m.name << ": R@" << k << " " << m.recall.at(k) << ", MAP " << m.map << ", ExpUtil@1 " << m.exp_util_at_1 << "\n";
    }
    if (rep.latency) out << "speedup " << rep.latency->speedup << "x\n";
  } else if (cmd == "bench") {
    const auto l = app::run_bench(cfg);
    out << "index path median " << l.index_path.median_ms << " ms, rerank path median "
        << l.rerank_path.median_ms << " ms, speedup " << l.speedup << "x\n";
  } else if (cmd == "serve") {
    const auto service = app::RetrievalService::load(cfg.paths.artifact("encoder.bin"),
                                                     cfg.paths.artifact("index.bin"));
    app::HttpServer server(service, cfg.serve.default_k);
    const int port = server.bind(cfg.serve.host, cfg.serve.port);
    out << "listening on " << cfg.serve.host << ":" << port << std::endl;
    server.listen();
  }
  return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Utility-aligned embeddings: training, indexing, evaluation and serving", "uae"};
  cli.require_subcommand(1, 1);
  cli.fallthrough();
  Overrides o;
  cli.add_option("--config", o.config_path, "Pipeline config (JSON)");
  cli.add_option("--seed", o.seed, "Global seed");
  cli.add_option("--data-dir", o.data_dir, "Directory of corpus/queries/pools");
  cli.add_option("--artifacts-dir", o.artifacts_dir, "Directory for stage outputs");

  auto* synth = cli.add_subcommand("synth", "Generate the synthetic benchmark");
  synth->add_option("--num-docs", o.num_docs);
  synth->add_option("--num-queries", o.num_queries);
  synth->add_option("--pool-size", o.pool_size);
  cli.add_subcommand("ingest", "Validate the dataset and write manifest.json");
  cli.add_subcommand("score-utility", "Score every pool document with the oracle");
  auto* tr = cli.add_subcommand("train-reward", "Train the reward model");
  tr->add_option("--epochs", o.reward_epochs);
  auto* mine = cli.add_subcommand("mine", "Mine utility-gated hard negatives");
  mine->add_option("--delta-mode", o.delta_mode, "pool_std or fixed");
  auto* tret = cli.add_subcommand("train-retriever", "Distill the bi-encoder (and the InfoNCE baseline)");
  tret->add_option("--epochs", o.distill_epochs);
  tret->add_flag("--cross-query", o.cross_query, "Use other queries' candidates as negatives");
  cli.add_subcommand("build-index", "Encode the corpus and build the vector index");
  auto* ret = cli.add_subcommand("retrieve", "Retrieve for one question, or for every test query");
  ret->add_option("--question", o.question);
  ret->add_option("--k", o.k);
  auto* ev = cli.add_subcommand("evaluate", "Evaluate all methods and write the reports");
  ev->add_option("--relevance", o.relevance, "gold or threshold");
  cli.add_subcommand("bench", "Latency benchmark of the index and rerank paths");
  auto* serve = cli.add_subcommand("serve", "HTTP retrieval service");
  serve->add_option("--host", o.host);
  serve->add_option("--port", o.port);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return cli.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << cli.help();
    return 1;
  }

  const std::string cmd = cli.get_subcommands().front()->get_name();
  try {
    return run(cmd, o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace uae::cli
