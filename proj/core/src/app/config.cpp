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

#include "uae/app/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace uae::app {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

fs::path PathsCfg::corpus_path() const {
  return corpus.empty() ? data_dir / "corpus.jsonl" : corpus;
}
fs::path PathsCfg::queries_path() const {
  return queries.empty() ? data_dir / "queries.jsonl" : queries;
}
fs::path PathsCfg::pools_path() const { return pools.empty() ? data_dir / "pools.jsonl" : pools; }
fs::path PathsCfg::artifact(std::string_view name) const { return artifacts_dir / name; }

namespace {

// Reads the keys of one JSON object and rejects whatever it was not asked for.
class Section {
 public:
  Section(const json& parent, std::string name) : name_(std::move(name)) {
    if (parent.contains(name_)) {
      node_ = &parent.at(name_);
      if (!node_->is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
    }
  }
  explicit Section(const json& root) : node_(&root) {}

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + where(key) + "' has the wrong type");
    }
  }

  void get_path(const char* key, fs::path& out) {
    std::string s = out.string();
    get(key, s);
    out = s;
  }

  // Marks a key as handled by a nested Section.
  void claim(const char* key) { seen_.insert(key); }

  void finish() const {
    if (!node_) return;
    for (const auto& [k, v] : node_->items()) {
      if (!seen_.contains(k)) throw ConfigError("unknown config key '" + where(k) + "'");
    }
  }

 private:
  std::string where(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }
  const json* node_ = nullptr;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

void PipelineConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
  };
  require(schema_version == kSchemaVersion,
          "schema_version " + std::to_string(schema_version) + " is not supported (expected " +
              std::to_string(kSchemaVersion) + ")");
  require(synth.num_docs >= 1 && synth.num_queries >= 1, "synth needs documents and queries");
  require(synth.pool_size >= 2 && synth.pool_size <= synth.num_docs,
          "synth.pool_size must be in [2, num_docs]");
  require(synth.lexical_fraction >= 0.0 && synth.lexical_fraction <= 1.0,
          "synth.lexical_fraction must be in [0, 1]");
  require(data.pool_size >= 1, "data.pool_size must be >= 1");
  require(data.min_freq >= 1, "data.min_freq must be >= 1");
  require(data.test_fraction > 0.0 && data.test_fraction < 1.0,
          "data.test_fraction must be in (0, 1)");
  require(oracle.model.order >= 1, "oracle.order must be >= 1");
  require(oracle.model.add_k > 0.0, "oracle.add_k must be > 0");
  require(oracle.model.copy_weight >= 0.0 && oracle.model.copy_weight < 1.0,
          "oracle.copy_weight must be in [0, 1)");
  require(oracle.model.copy_context_weight >= 0.0 && oracle.model.copy_context_weight <= 1.0,
          "oracle.copy_context_weight must be in [0, 1]");
  require(oracle.noise_sigma >= 0.0, "oracle.noise_sigma must be >= 0");
  require(oracle.histogram_bins >= 1, "oracle.histogram_bins must be >= 1");
  require(reward.margin > 0.0, "reward.margin must be > 0");
  require(reward.min_gap >= 0.0, "reward.min_gap must be >= 0");
  require(reward.pairs_per_query >= 1, "reward.pairs_per_query must be >= 1");
  require(reward.lr > 0.0, "reward.lr must be > 0");
  require(reward.batch_size >= 1, "reward.batch_size must be >= 1");
  require(reward.weight_decay >= 0.0, "reward.weight_decay must be >= 0");
  require(reward.dim >= 1 && reward.hidden >= 1, "reward dims must be >= 1");
  require(miner.gate.k >= 1, "miner.k must be >= 1");
  require(miner.gate.m >= 1, "miner.m must be >= 1");
  require(miner.gate.delta_scale >= 0.0, "miner.delta_scale must be >= 0");
  require(miner.gate.delta_fixed >= 0.0, "miner.delta_fixed must be >= 0");
  require(distill.lambda >= 0.0, "distill.lambda must be >= 0");
  require(distill.tau > 0.0, "distill.tau must be > 0");
  require(distill.lr > 0.0, "distill.lr must be > 0");
  require(distill.weight_decay >= 0.0, "distill.weight_decay must be >= 0");
  require(distill.batch_size >= 1, "distill.batch_size must be >= 1");
  require(distill.dim >= 1, "distill.dim must be >= 1");
  require(index.params.M >= 2, "index.M must be >= 2");
  require(index.params.ef_construction >= 1, "index.ef_construction must be >= 1");
  require(index.params.ef_search >= 1, "index.ef_search must be >= 1");
  require(eval.relevance == "gold" || eval.relevance == "threshold",
          "eval.relevance must be \"gold\" or \"threshold\"");
  require(eval.threshold >= 0.0 && eval.threshold <= 1.0, "eval.threshold must be in [0, 1]");
  require(!eval.k_list.empty(), "eval.k_list must not be empty");
  for (auto k : eval.k_list) require(k >= 1, "eval.k_list entries must be >= 1");
  require(eval.min_gap >= 0.0, "eval.min_gap must be >= 0");
  require(eval.max_gen_len >= 1, "eval.max_gen_len must be >= 1");
  require(eval.latency_queries >= 1, "eval.latency_queries must be >= 1");
  require(eval.latency_repetitions >= 1, "eval.latency_repetitions must be >= 1");
  require(serve.port >= 0 && serve.port <= 65535, "serve.port must be in [0, 65535]");
  require(serve.default_k >= 1, "serve.default_k must be >= 1");
}

void propagate_seed(PipelineConfig& cfg) {
  cfg.synth.seed = cfg.seed;
  cfg.reward.seed = cfg.seed;
  cfg.distill.seed = cfg.seed;
  cfg.index.params.seed = derive_seed(cfg.seed, "hnsw");
}

PipelineConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");

  PipelineConfig c;
  Section top(root);
  top.get("schema_version", c.schema_version);
  top.get("seed", c.seed);

  Section p(root, "paths");
  top.claim("paths");
  p.get_path("data_dir", c.paths.data_dir);
  p.get_path("artifacts_dir", c.paths.artifacts_dir);
  p.get_path("corpus", c.paths.corpus);
  p.get_path("queries", c.paths.queries);
  p.get_path("pools", c.paths.pools);
  p.finish();

  Section s(root, "synth");
  top.claim("synth");
  s.get("num_docs", c.synth.num_docs);
  s.get("num_queries", c.synth.num_queries);
  s.get("pool_size", c.synth.pool_size);
  s.get("answer_vocab", c.synth.answer_vocab);
  s.get("lexical_fraction", c.synth.lexical_fraction);
  s.get("num_relations", c.synth.num_relations);
  s.finish();

  Section d(root, "data");
  top.claim("data");
  d.get("pool_size", c.data.pool_size);
  d.get("min_freq", c.data.min_freq);
  d.get("test_fraction", c.data.test_fraction);
  d.finish();

  Section o(root, "oracle");
  top.claim("oracle");
  o.get("order", c.oracle.model.order);
  o.get("add_k", c.oracle.model.add_k);
  o.get("copy_weight", c.oracle.model.copy_weight);
  o.get("copy_context_weight", c.oracle.model.copy_context_weight);
  o.get("noise_sigma", c.oracle.noise_sigma);
  o.get("histogram_bins", c.oracle.histogram_bins);
  o.finish();

  Section r(root, "reward");
  top.claim("reward");
  r.get("margin", c.reward.margin);
  r.get("min_gap", c.reward.min_gap);
  r.get("pairs_per_query", c.reward.pairs_per_query);
  r.get("lr", c.reward.lr);
  r.get("epochs", c.reward.epochs);
  r.get("batch_size", c.reward.batch_size);
  r.get("weight_decay", c.reward.weight_decay);
  r.get("dim", c.reward.dim);
  r.get("hidden", c.reward.hidden);
  r.finish();

  Section m(root, "miner");
  top.claim("miner");
  m.get("k", c.miner.gate.k);
  m.get("m", c.miner.gate.m);
  std::string mode = miner::to_string(c.miner.gate.delta_mode);
  m.get("delta_mode", mode);
  try {
    c.miner.gate.delta_mode = miner::parse_delta_mode(mode);
  } catch (const Error& e) {
    throw ConfigError(std::string("miner.delta_mode: ") + e.what());
  }
  m.get("delta_scale", c.miner.gate.delta_scale);
  m.get("delta_fixed", c.miner.gate.delta_fixed);
  m.get("threads", c.miner.threads);
  m.finish();

  Section t(root, "distill");
  top.claim("distill");
  t.get("lambda", c.distill.lambda);
  t.get("tau", c.distill.tau);
  t.get("standardize", c.distill.standardize);
  t.get("lr", c.distill.lr);
  t.get("weight_decay", c.distill.weight_decay);
  t.get("batch_size", c.distill.batch_size);
  t.get("epochs", c.distill.epochs);
  t.get("cross_query", c.distill.cross_query);
  t.get("dim", c.distill.dim);
  t.finish();

  Section x(root, "index");
  top.claim("index");
  x.get("hnsw", c.index.hnsw);
  x.get("M", c.index.params.M);
  x.get("ef_construction", c.index.params.ef_construction);
  x.get("ef_search", c.index.params.ef_search);
  x.finish();

  Section e(root, "eval");
  top.claim("eval");
  e.get("relevance", c.eval.relevance);
  e.get("threshold", c.eval.threshold);
  e.get("k_list", c.eval.k_list);
  e.get("min_gap", c.eval.min_gap);
  e.get("max_gen_len", c.eval.max_gen_len);
  e.get("generation", c.eval.generation);
  e.get("latency_queries", c.eval.latency_queries);
  e.get("latency_repetitions", c.eval.latency_repetitions);
  e.get("latency_warmup", c.eval.latency_warmup);
  e.finish();

  Section v(root, "serve");
  top.claim("serve");
  v.get("host", c.serve.host);
  v.get("port", c.serve.port);
  v.get("default_k", c.serve.default_k);
  v.finish();

  top.finish();
  propagate_seed(c);
  c.validate();
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_json(const PipelineConfig& c) {
  ordered_json j;
  j["schema_version"] = c.schema_version;
  j["seed"] = c.seed;
  j["paths"] = {{"data_dir", c.paths.data_dir.string()},
                {"artifacts_dir", c.paths.artifacts_dir.string()},
                {"corpus", c.paths.corpus.string()},
                {"queries", c.paths.queries.string()},
                {"pools", c.paths.pools.string()}};
  j["synth"] = {{"num_docs", c.synth.num_docs},
                {"num_queries", c.synth.num_queries},
                {"pool_size", c.synth.pool_size},
                {"answer_vocab", c.synth.answer_vocab},
                {"lexical_fraction", c.synth.lexical_fraction},
                {"num_relations", c.synth.num_relations}};
  j["data"] = {{"pool_size", c.data.pool_size},
               {"min_freq", c.data.min_freq},
               {"test_fraction", c.data.test_fraction}};
  j["oracle"] = {{"order", c.oracle.model.order},
                 {"add_k", c.oracle.model.add_k},
                 {"copy_weight", c.oracle.model.copy_weight},
                 {"copy_context_weight", c.oracle.model.copy_context_weight},
                 {"noise_sigma", c.oracle.noise_sigma},
                 {"histogram_bins", c.oracle.histogram_bins}};
  j["reward"] = {{"margin", c.reward.margin},
                 {"min_gap", c.reward.min_gap},
                 {"pairs_per_query", c.reward.pairs_per_query},
                 {"lr", c.reward.lr},
                 {"epochs", c.reward.epochs},
                 {"batch_size", c.reward.batch_size},
                 {"weight_decay", c.reward.weight_decay},
                 {"dim", c.reward.dim},
                 {"hidden", c.reward.hidden}};
  j["miner"] = {{"k", c.miner.gate.k},
                {"m", c.miner.gate.m},
                {"delta_mode", miner::to_string(c.miner.gate.delta_mode)},
                {"delta_scale", c.miner.gate.delta_scale},
                {"delta_fixed", c.miner.gate.delta_fixed},
                {"threads", c.miner.threads}};
  j["distill"] = {{"lambda", c.distill.lambda},
                  {"tau", c.distill.tau},
                  {"standardize", c.distill.standardize},
                  {"lr", c.distill.lr},
                  {"weight_decay", c.distill.weight_decay},
                  {"batch_size", c.distill.batch_size},
                  {"epochs", c.distill.epochs},
                  {"cross_query", c.distill.cross_query},
                  {"dim", c.distill.dim}};
  j["index"] = {{"hnsw", c.index.hnsw},
                {"M", c.index.params.M},
                {"ef_construction", c.index.params.ef_construction},
                {"ef_search", c.index.params.ef_search}};
  j["eval"] = {{"relevance", c.eval.relevance},
               {"threshold", c.eval.threshold},
               {"k_list", c.eval.k_list},
               {"min_gap", c.eval.min_gap},
               {"max_gen_len", c.eval.max_gen_len},
               {"generation", c.eval.generation},
               {"latency_queries", c.eval.latency_queries},
               {"latency_repetitions", c.eval.latency_repetitions},
               {"latency_warmup", c.eval.latency_warmup}};
  j["serve"] = {{"host", c.serve.host},
                {"port", c.serve.port},
                {"default_k", c.serve.default_k}};
  return j.dump(2);
}

void apply_env_overrides(PipelineConfig& cfg, const EnvLookup& env) {
  if (auto dir = env("UAE_DATA_DIR"); dir && !dir->empty()) cfg.paths.data_dir = *dir;
  if (auto port = env("UAE_PORT"); port && !port->empty()) {
    try {
      std::size_t used = 0;
      const int p = std::stoi(*port, &used);
      if (used != port->size()) throw std::invalid_argument("trailing");
      cfg.serve.port = p;
    } catch (const std::exception&) {
      throw ConfigError("UAE_PORT is not an integer: '" + *port + "'");
    }
  }
  cfg.validate();
}

void apply_env_overrides(PipelineConfig& cfg) {
  apply_env_overrides(cfg, [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v) return std::nullopt;
    return std::string(v);
  });
}

}  // namespace uae::app
