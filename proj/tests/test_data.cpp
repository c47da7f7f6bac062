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

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "test_util.hpp"
#include "uae/data/dataset.hpp"
#include "uae/data/tokenizer.hpp"

namespace uae::data {
namespace {

TEST(Tokenizer, FrequencyThreshold) {
  const std::vector<std::string> texts{"a b", "a c"};
  const auto tok = Tokenizer::build(texts, 2);
  EXPECT_EQ(tok.size(), kNumReserved + 1);
  EXPECT_TRUE(tok.contains("a"));
  EXPECT_FALSE(tok.contains("b"));
}

TEST(Tokenizer, SortedIdAssignment) {
  const std::vector<std::string> texts{"c b", "a c"};
  const auto tok = Tokenizer::build(texts, 1);
  EXPECT_EQ(tok.size(), 8u);
  EXPECT_EQ(tok.id("a"), 5u);
  EXPECT_EQ(tok.id("b"), 6u);
  EXPECT_EQ(tok.id("c"), 7u);
  EXPECT_EQ(tok.token(kPad), "<pad>");
}

TEST(Tokenizer, NormalizationAndUnknown) {
  const std::vector<std::string> texts{"the cat sat"};
  const auto tok = Tokenizer::build(texts);
  EXPECT_EQ(tok.tokenize("The cat, sat."),
            (TokenSeq{tok.id("the"), tok.id("cat"), tok.id("sat")}));
  EXPECT_EQ(tok.tokenize("Zzyzx"), (TokenSeq{kUnk}));
  EXPECT_TRUE(tok.tokenize(" ... ").empty());
}

TEST(Tokenizer, NormalizeIsIdempotent) {
  const std::string text = "Hello,World!  it's   A-test";
  const auto once = normalize(text);
  std::string joined;
  for (const auto& w : once) joined += w + " ";
  EXPECT_EQ(normalize(joined), once);
  EXPECT_EQ(once, (std::vector<std::string>{"hello", "world", "it", "s", "a", "test"}));
}

std::vector<std::string> random_texts(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(1, 12), letter(0, 5), wl(1, 4);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string t;
    for (int w = len(rng); w > 0; --w) {
      for (int c = wl(rng); c > 0; --c) t.push_back(static_cast<char>('a' + letter(rng)));
      t.push_back(' ');
    }
    out.push_back(t);
  }
  return out;
}

TEST(Tokenizer, DeterministicAcrossBuilds) {
  const auto texts = random_texts(7, 1000);
  const auto a = Tokenizer::build(texts);
  const auto b = Tokenizer::build(texts);
  EXPECT_EQ(a, b);
  EXPECT_GT(a.size(), kNumReserved);
}

TEST(Tokenizer, DetokenizeRoundTrip) {
  const auto texts = random_texts(11, 200);
  const auto tok = Tokenizer::build(texts);
  for (const auto& t : texts) {
    const auto ids = tok.tokenize(t);
    EXPECT_EQ(tok.tokenize(tok.detokenize(ids)), ids);
  }
}

TEST(Tokenizer, FromVocabRoundTrip) {
  const std::vector<std::string> texts{"x y z"};
  const auto tok = Tokenizer::build(texts);
  const auto copy = Tokenizer::from_vocab({tok.vocab().begin(), tok.vocab().end()});
  EXPECT_EQ(copy, tok);
  EXPECT_THROW(Tokenizer::from_vocab({"x"}), FormatError);
}

TEST(Tokenizer, EmptyCorpusRejected) {
  const std::vector<std::string> none;
  EXPECT_THROW(Tokenizer::build(none), IngestError);
}

std::vector<DocumentRecord> three_docs() {
  return {{"d1", "alpha beta"}, {"d2", "beta gamma"}, {"d3", "gamma delta"}};
}

TEST(Dataset, HappyPath) {
  const auto ds = Dataset::build(three_docs(), {{"q1", "what beta", {"gamma"}, {"d2"}}},
                                 {{"q1", {"d1", "d2", "d3"}}}, {.pool_size = 3});
  EXPECT_EQ(ds.query("q1").gold_doc_ids.front(), "d2");
  EXPECT_EQ(ds.doc("d2").text, "beta gamma");
  EXPECT_EQ(ds.pool("q1").doc_ids.size(), 3u);
  EXPECT_EQ(ds.doc("d1").tokens, ds.tokenizer().tokenize("alpha beta"));
}

TEST(Dataset, DanglingGoldNamesTheId) {
  try {
    Dataset::build(three_docs(), {{"q1", "what", {"x"}, {"d9"}}}, {{"q1", {"d1", "d2", "d3"}}},
                   {.pool_size = 3});
    FAIL() << "expected ReferentialError";
  } catch (const ReferentialError& e) {
    EXPECT_EQ(e.missing_id(), "d9");
    EXPECT_NE(std::string(e.what()).find("d9"), std::string::npos);
  }
}

TEST(Dataset, PoolSizeEnforced) {
  EXPECT_THROW(Dataset::build(three_docs(), {{"q1", "what", {"x"}, {"d1"}}},
                              {{"q1", {"d1", "d2"}}}, {.pool_size = 3}),
               IngestError);
}

TEST(Dataset, PoolMustHoldGold) {
  EXPECT_THROW(Dataset::build(three_docs(), {{"q1", "what", {"x"}, {"d1"}}},
                              {{"q1", {"d2", "d3"}}}, {.pool_size = 2}),
               IngestError);
  LoadOptions lax{.pool_size = 2, .require_gold_in_pool = false};
  EXPECT_NO_THROW(Dataset::build(three_docs(), {{"q1", "what", {"x"}, {"d1"}}},
                                 {{"q1", {"d2", "d3"}}}, lax));
}

TEST(Dataset, DuplicatesRejected) {
  auto docs = three_docs();
  docs.push_back({"d1", "again"});
  EXPECT_THROW(Dataset::build(docs, {}, {}, {.pool_size = 3}), IngestError);
  EXPECT_THROW(Dataset::build(three_docs(), {{"q1", "a", {"x"}, {"d1"}}, {"q1", "b", {"y"}, {"d1"}}},
                              {}, {.pool_size = 3}),
               IngestError);
}

TEST(Dataset, DocumentWithoutTokensRejected) {
  EXPECT_THROW(Dataset::build({{"d1", "?!"}}, {}, {}, {.pool_size = 1}), IngestError);
}

TEST(Dataset, BlankAnswerRejected) {
  EXPECT_THROW(Dataset::build(three_docs(), {{"q1", "what", {" . "}, {"d1"}}},
                              {{"q1", {"d1", "d2", "d3"}}}, {.pool_size = 3}),
               IngestError);
}

TEST(Dataset, MalformedLineReportsLineNumber) {
  std::istringstream in("{\"doc_id\": \"d1\", \"text\": \"a\"}\n{not json}\n");
  try {
    parse_corpus(in);
    FAIL() << "expected IngestError";
  } catch (const IngestError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Dataset, UnknownFieldRejected) {
  std::istringstream in("{\"doc_id\": \"d1\", \"text\": \"a\", \"extra\": 1}\n");
  EXPECT_THROW(parse_corpus(in), IngestError);
}

TEST(Dataset, MissingFileIsMissingInput) {
  EXPECT_THROW(Dataset::load("/nonexistent/c.jsonl", "/nonexistent/q.jsonl",
                             "/nonexistent/p.jsonl"),
               MissingInputError);
}

TEST(Dataset, WriteLoadRoundTrip) {
  testing::TempDir dir("data");
  const auto ds = Dataset::build(three_docs(), {{"q1", "what beta", {"gamma", "g"}, {"d2"}}},
                                 {{"q1", {"d1", "d2", "d3"}}}, {.pool_size = 3});
  ds.write(dir / "c.jsonl", dir / "q.jsonl", dir / "p.jsonl");
  const auto back = Dataset::load(dir / "c.jsonl", dir / "q.jsonl", dir / "p.jsonl", {.pool_size = 3});
  EXPECT_EQ(back, ds);
}

}  // namespace
}  // namespace uae::data
