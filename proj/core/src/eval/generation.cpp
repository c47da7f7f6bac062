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

#include "uae/eval/generation.hpp"

#include "uae/eval/answer_metrics.hpp"

namespace uae::eval {

GenerationResult generation_eval(const RunRanking& run, const oracle::Generator& gen,
                                 const data::Dataset& ds, std::size_t max_len) {
  for (const auto& [qid, ranked] : run) {
    if (ranked.empty()) throw ValidationError("empty ranking for query \"" + qid + "\"");
  }
  GenerationResult out;
  double f1_sum = 0.0, rouge_sum = 0.0;
  for (const auto& [qid, ranked] : run) {
    const auto& q = ds.query(qid);
    double f1 = 0.0, rl = 0.0;
    try {
      const auto ids = gen.greedy_decode(q.question_tokens, ds.doc(ranked.front()).tokens, max_len);
      const auto text = ds.tokenizer().detokenize(ids);
      f1 = token_f1(text, q.answers);
      rl = rouge_l(text, q.answers);
      out.predictions[qid] = text;
    } catch (const Error&) {
      out.flagged.push_back(qid);
    }
    out.per_query_f1[qid] = f1;
    out.per_query_rouge[qid] = rl;
    f1_sum += f1;
    rouge_sum += rl;
    ++out.counted;
  }
  if (out.counted) {
    out.gen_f1 = f1_sum / static_cast<double>(out.counted);
    out.rouge_l = rouge_sum / static_cast<double>(out.counted);
  }
  return out;
}

}  // namespace uae::eval
