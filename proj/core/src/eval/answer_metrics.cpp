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

#include "uae/eval/answer_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "uae/common.hpp"

namespace uae::eval {

std::vector<std::string> answer_tokens(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::ispunct(c)) continue;
    cleaned.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
  }
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && cur != "a" && cur != "an" && cur != "the") out.push_back(cur);
    cur.clear();
  };
  for (char ch : cleaned) {
    if (static_cast<unsigned char>(ch) < 0x80 && std::isspace(static_cast<unsigned char>(ch))) {
      flush();
    } else {
      cur.push_back(ch);
    }
  }
  flush();
  return out;
}

double token_f1(std::span<const std::string> pred, std::span<const std::string> gold) {
  if (pred.empty() || gold.empty()) return pred.empty() && gold.empty() ? 1.0 : 0.0;
  std::map<std::string_view, long> counts;
  for (const auto& t : gold) ++counts[t];
  long common = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double p = static_cast<double>(common) / static_cast<double>(pred.size());
  const double r = static_cast<double>(common) / static_cast<double>(gold.size());
  return 2.0 * p * r / (p + r);
}

double rouge_l(std::span<const std::string> pred, std::span<const std::string> gold) {
  if (pred.empty() || gold.empty()) return pred.empty() && gold.empty() ? 1.0 : 0.0;
  std::vector<std::size_t> prev(gold.size() + 1, 0), cur(gold.size() + 1, 0);
  for (std::size_t i = 1; i <= pred.size(); ++i) {
    for (std::size_t j = 1; j <= gold.size(); ++j) {
      cur[j] = pred[i - 1] == gold[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const auto lcs = prev[gold.size()];
  if (lcs == 0) return 0.0;
  const double p = static_cast<double>(lcs) / static_cast<double>(pred.size());
  const double r = static_cast<double>(lcs) / static_cast<double>(gold.size());
  return 2.0 * p * r / (p + r);
}

namespace {

template <typename F>
double best_over(std::string_view prediction, std::span<const std::string> answers, F metric) {
  if (answers.empty()) throw ValidationError("answer set must be non-empty");
  const auto pred = answer_tokens(prediction);
  double best = 0.0;
  for (const auto& a : answers) best = std::max(best, metric(pred, answer_tokens(a)));
  return best;
}

}  // namespace

double token_f1(std::string_view prediction, std::span<const std::string> answers) {
  return best_over(prediction, answers,
                   [](const auto& p, const auto& g) { return token_f1(p, g); });
}

double rouge_l(std::string_view prediction, std::span<const std::string> answers) {
  return best_over(prediction, answers,
                   [](const auto& p, const auto& g) { return rouge_l(p, g); });
}

}  // namespace uae::eval
