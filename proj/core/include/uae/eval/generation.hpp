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

#include <map>
#include <string>
#include <vector>

#include "uae/data/dataset.hpp"
#include "uae/eval/metrics.hpp"
#include "uae/oracle/generator.hpp"

namespace uae::eval {

struct GenerationResult {
  double gen_f1 = 0.0;
  double rouge_l = 0.0;
  std::size_t counted = 0;
  std::vector<std::string> flagged;  // decode failures, scored 0
  std::map<std::string, std::string> predictions;
  std::map<std::string, double> per_query_f1;
  std::map<std::string, double> per_query_rouge;
};

/// Greedy-decodes an answer from each query's top-1 document and scores it
/// against the gold answers. Throws ValidationError when a ranking is empty.
GenerationResult generation_eval(const RunRanking& run, const oracle::Generator& gen,
                                 const data::Dataset& ds, std::size_t max_len = 8);

}  // namespace uae::eval
