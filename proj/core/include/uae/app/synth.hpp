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
#include <vector>

#include "uae/data/dataset.hpp"

namespace uae::app {

struct SynthSpec {
  std::size_t num_docs = 2000;
  std::size_t num_queries = 500;
  std::size_t pool_size = 50;
  std::size_t answer_vocab = 200;
  double lexical_fraction = 0.6;  // share of non-gold pool slots drawn from lexical distractors
  std::size_t num_relations = 10;
  std::uint64_t seed = 0;
};

struct SynthData {
  std::vector<data::DocumentRecord> corpus;
  std::vector<data::QueryRecord> queries;
  std::vector<data::CandidatePool> pools;
};

/// Entity/relation benchmark with semantic distractors.
///
/// Every entity (a two-word name) has one fact. Its query asks "what is the
/// <query word> of <entity>"; the gold document states the fact with a
/// different cue word ("the <cue> of <entity> is <answer>"). The remaining
/// documents repeat the query vocabulary ("the <query word> of <entity> ...")
/// without the answer. A pool holds the gold, lexical distractors that share
/// the entity or the query word but none of the answer tokens, and random
/// documents that do not contain any answer verbatim.
SynthData generate_synthetic(const SynthSpec& spec);

}  // namespace uae::app
