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

#include "uae/app/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

namespace uae::app {

namespace {

class WordMaker {
 public:
  explicit WordMaker(std::mt19937_64& rng) : rng_(rng) {
    for (const char* w : {"what", "is", "the", "of", "a", "an", "and"}) used_.insert(w);
  }
  std::string make() {
    static constexpr std::string_view kOnset = "bdfgklmnprstvz";
    static constexpr std::string_view kVowel = "aeiou";
    for (;;) {
      std::uniform_int_distribution<int> syl(2, 3);
      std::string w;
      const int n = syl(rng_);
      for (int i = 0; i < n; ++i) {
        w.push_back(kOnset[pick(kOnset.size())]);
        w.push_back(kVowel[pick(kVowel.size())]);
      }
      if (used_.insert(w).second) return w;
    }
  }
  std::vector<std::string> make(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(make());
    return out;
  }

 private:
  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }
  std::mt19937_64& rng_;
  std::unordered_set<std::string> used_;
};

struct Fact {
  std::size_t entity = 0;
  std::size_t relation = 0;
  std::vector<std::string> answer;
  bool queried = false;
};

struct DocDraft {
  std::vector<std::string> words;
  std::size_t entity = 0;
  std::set<std::size_t> mentions;
  std::ptrdiff_t fact = -1;  // index into facts when this is a fact doc
};

std::string join(const std::vector<std::string>& w) {
  std::string s;
  for (const auto& x : w) {
    if (!s.empty() && x != ".") s.push_back(' ');
    s += x;
  }
  return s;
}

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

SynthData generate_synthetic(const SynthSpec& spec) {
  if (spec.num_queries == 0 || spec.num_docs == 0) {
    throw ConfigError("synthetic spec needs at least one document and one query");
  }
  if (spec.pool_size < 2) throw ConfigError("pool size must be >= 2");
  if (spec.pool_size > spec.num_docs) throw ConfigError("pool size exceeds the corpus size");
  if (spec.num_relations < 1) throw ConfigError("need at least one relation");
  if (spec.answer_vocab < 3 * spec.num_relations) {
    throw ConfigError("answer vocabulary must hold >= 3 words per relation");
  }
  if (!(spec.lexical_fraction >= 0.0 && spec.lexical_fraction <= 1.0)) {
    throw ConfigError("lexical fraction must be in [0, 1]");
  }

  std::mt19937_64 rng(derive_seed(spec.seed, "synth"));
  auto uniform = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };

  WordMaker words(rng);
  const std::size_t num_entities = spec.num_queries;
  // Two-word entity names drawn from shared first/second name inventories, so
  // every name word occurs across many entities.
  std::size_t side = 2;
  while (side * side < 4 * num_entities) ++side;
  const auto first_names = words.make(side);
  const auto second_names = words.make(side);
  std::vector<std::string> entities;
  {
    std::set<std::pair<std::size_t, std::size_t>> taken;
    while (entities.size() < num_entities) {
      const auto a = uniform(side), b = uniform(side);
      if (taken.insert({a, b}).second) entities.push_back(first_names[a] + " " + second_names[b]);
    }
  }
  const auto query_words = words.make(spec.num_relations);
  const auto cue_words = words.make(spec.num_relations);
  const auto filler = words.make(400);
  std::vector<std::vector<std::string>> answer_words(spec.num_relations);
  for (std::size_t r = 0; r < spec.num_relations; ++r) {
    answer_words[r] = words.make(spec.answer_vocab / spec.num_relations);
  }

  // One queried fact per entity.
  std::vector<Fact> facts;
  for (std::size_t e = 0; e < num_entities; ++e) {
    Fact f;
    f.entity = e;
    f.relation = uniform(spec.num_relations);
    const std::size_t len = coin(0.5) ? 2 : 3;
    const auto& pool = answer_words[f.relation];
    std::vector<std::size_t> pick(pool.size());
    for (std::size_t k = 0; k < pick.size(); ++k) pick[k] = k;
    std::shuffle(pick.begin(), pick.end(), rng);
    for (std::size_t k = 0; k < len; ++k) f.answer.push_back(pool[pick[k]]);
    f.queried = true;
    facts.push_back(std::move(f));
  }

  auto filler_sentence = [&](std::size_t e, const std::string* topic,
                             std::vector<std::string>& out) {
    out.push_back(entities[e]);
    if (topic) out.push_back(*topic);
    const std::size_t n = 3 + uniform(3);
    for (std::size_t i = 0; i < n; ++i) out.push_back(filler[uniform(filler.size())]);
    out.push_back(".");
  };

  std::vector<DocDraft> drafts;
  for (std::size_t fi = 0; fi < facts.size(); ++fi) {
    const auto& f = facts[fi];
    DocDraft d;
    d.entity = f.entity;
    d.mentions.insert(f.entity);
    d.fact = static_cast<std::ptrdiff_t>(fi);
    const std::size_t sentences = 2 + uniform(2);
    const std::size_t at = uniform(sentences);
    for (std::size_t s = 0; s < sentences; ++s) {
      if (s == at) {
        for (const auto& w : {std::string("the"), cue_words[f.relation], std::string("of"),
                              entities[f.entity], std::string("is")}) {
          d.words.push_back(w);
        }
        d.words.insert(d.words.end(), f.answer.begin(), f.answer.end());
        d.words.push_back(".");
      } else {
        filler_sentence(f.entity, nullptr, d.words);
      }
    }
    drafts.push_back(std::move(d));
  }
  if (drafts.size() > spec.num_docs) {
    throw ConfigError("corpus too small: " + std::to_string(drafts.size()) +
                      " fact documents are needed");
  }
  // Distractors repeat the query vocabulary (entity and query word) without
  // stating the fact. Entities are covered round-robin.
  for (std::size_t i = 0; drafts.size() < spec.num_docs; ++i) {
    DocDraft d;
    const std::size_t e = i % num_entities;
    d.entity = e;
    d.mentions.insert(e);
    const std::size_t rel = coin(0.7) ? facts[e].relation : uniform(spec.num_relations);
    const std::size_t sentences = 2 + uniform(2);
    for (std::size_t s = 0; s < sentences; ++s) {
      if (s == 0) {
        for (const auto& w : {std::string("the"), query_words[rel], std::string("of")}) {
          d.words.push_back(w);
        }
      }
      filler_sentence(e, s == 0 || coin(0.5) ? &query_words[rel] : nullptr, d.words);
    }
    drafts.push_back(std::move(d));
  }

  // Shuffle so that doc ids carry no information.
  std::shuffle(drafts.begin(), drafts.end(), rng);
  const int width = static_cast<int>(std::to_string(spec.num_docs).size());
  SynthData out;
  std::map<std::ptrdiff_t, std::size_t> fact_doc;
  std::vector<std::vector<std::size_t>> docs_of_entity(num_entities);
  std::vector<std::vector<std::size_t>> docs_with_word(spec.num_relations);
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "d%0*zu", width, i);
    out.corpus.push_back({id, join(drafts[i].words)});
    if (drafts[i].fact >= 0) fact_doc[drafts[i].fact] = i;
    for (auto e : drafts[i].mentions) docs_of_entity[e].push_back(i);
    for (std::size_t r = 0; r < spec.num_relations; ++r) {
      if (std::find(drafts[i].words.begin(), drafts[i].words.end(), query_words[r]) !=
          drafts[i].words.end()) {
        docs_with_word[r].push_back(i);
      }
    }
  }
  std::vector<std::set<std::string>> doc_vocab(drafts.size());
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    doc_vocab[i] = std::set<std::string>(drafts[i].words.begin(), drafts[i].words.end());
  }

  std::vector<std::size_t> queried_facts;
  for (std::size_t fi = 0; fi < facts.size(); ++fi) {
    if (facts[fi].queried) queried_facts.push_back(fi);
  }
  std::shuffle(queried_facts.begin(), queried_facts.end(), rng);
  const int qwidth = static_cast<int>(std::to_string(spec.num_queries).size());
  const std::size_t non_gold = spec.pool_size - 1;
  const auto lexical_target =
      static_cast<std::size_t>(std::llround(spec.lexical_fraction * static_cast<double>(non_gold)));

  for (std::size_t qi = 0; qi < queried_facts.size(); ++qi) {
    const auto& f = facts[queried_facts[qi]];
    const auto gold = fact_doc.at(static_cast<std::ptrdiff_t>(queried_facts[qi]));
    char qid[32];
    std::snprintf(qid, sizeof qid, "q%0*zu", qwidth, qi);

    std::vector<std::vector<std::string>> answers{f.answer};
    if (f.answer.size() == 3 && coin(0.3)) answers.push_back({f.answer[1], f.answer[2]});
    data::QueryRecord q;
    q.query_id = qid;
    q.question = "what is the " + query_words[f.relation] + " of " + entities[f.entity];
    for (const auto& a : answers) q.answers.push_back(join(a));
    q.gold_doc_ids = {out.corpus[gold].doc_id};

    std::set<std::string> answer_vocab;
    for (const auto& a : answers) answer_vocab.insert(a.begin(), a.end());
    auto has_answer_token = [&](std::size_t d) {
      for (const auto& w : answer_vocab) {
        if (doc_vocab[d].contains(w)) return true;
      }
      return false;
    };
    auto has_answer_run = [&](std::size_t d) {
      for (const auto& a : answers) {
        if (contains_run(drafts[d].words, a)) return true;
      }
      return false;
    };

    std::set<std::size_t> chosen{gold};
    std::vector<std::size_t> lexical;
    for (auto d : docs_of_entity[f.entity]) {
      if (d != gold && !has_answer_token(d)) lexical.push_back(d);
    }
    std::shuffle(lexical.begin(), lexical.end(), rng);
    std::vector<std::size_t> topical;
    for (auto d : docs_with_word[f.relation]) {
      if (!drafts[d].mentions.contains(f.entity) && !has_answer_token(d)) topical.push_back(d);
    }
    std::shuffle(topical.begin(), topical.end(), rng);
    lexical.insert(lexical.end(), topical.begin(), topical.end());
    for (std::size_t i = 0; i < lexical.size() && chosen.size() < 1 + lexical_target; ++i) {
      chosen.insert(lexical[i]);
    }
    std::size_t guard = 0;
    while (chosen.size() < spec.pool_size) {
      const auto d = uniform(drafts.size());
      if (++guard > 1000 * spec.num_docs) throw ConfigError("cannot fill candidate pool");
      if (chosen.contains(d) || has_answer_run(d)) continue;
      chosen.insert(d);
    }
    std::vector<std::size_t> members(chosen.begin(), chosen.end());
    std::shuffle(members.begin(), members.end(), rng);
    data::CandidatePool pool{qid, {}};
    for (auto d : members) pool.doc_ids.push_back(out.corpus[d].doc_id);
    out.queries.push_back(std::move(q));
    out.pools.push_back(std::move(pool));
  }
  std::sort(out.queries.begin(), out.queries.end(),
            [](const auto& a, const auto& b) { return a.query_id < b.query_id; });
  std::sort(out.pools.begin(), out.pools.end(),
            [](const auto& a, const auto& b) { return a.query_id < b.query_id; });
  return out;
}

}  // namespace uae::app
