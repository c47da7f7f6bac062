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

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uae::eval {

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the, split on
/// whitespace.
std::vector<std::string> answer_tokens(std::string_view text);

/// Bag-of-tokens F1 on already-normalized tokens. Empty vs empty is 1.
double token_f1(std::span<const std::string> pred, std::span<const std::string> gold);

/// LCS F-measure (beta = 1) on already-normalized tokens. Empty vs empty is 1.
double rouge_l(std::span<const std::string> pred, std::span<const std::string> gold);

/// Max over the gold answers, after normalization.
double token_f1(std::string_view prediction, std::span<const std::string> answers);
double rouge_l(std::string_view prediction, std::span<const std::string> answers);

}  // namespace uae::eval
