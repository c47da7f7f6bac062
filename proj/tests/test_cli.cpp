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

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "cli.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace uae::cli {
namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "uae");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"frobnicate"}).code, 1);
  EXPECT_EQ(call({"synth", "--num-docs", "many"}).code, 1);
  EXPECT_EQ(call({"ingest", "score-utility"}).code, 1);
}

TEST(Cli, HelpExitsZero) {
  const auto r = call({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("train-reward"), std::string::npos);
}

TEST(Cli, MissingInputNamesTheFile) {
  testing::TempDir dir("cli-missing");
  const auto r = call({"--data-dir", (dir / "data").string(), "--artifacts-dir",
                       (dir / "art").string(), "score-utility"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("manifest.json"), std::string::npos) << r.err;
}

TEST(Cli, BadConfigExitsOne) {
  testing::TempDir dir("cli-config");
  std::ofstream(dir / "c.json") << R"({"nope": true})";
  const auto r = call({"--config", (dir / "c.json").string(), "ingest"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nope"), std::string::npos);
  EXPECT_EQ(call({"--config", (dir / "absent.json").string(), "ingest"}).code, 1);
}

TEST(Cli, CorruptArtifactExitsTwo) {
  testing::TempDir dir("cli-corrupt");
  std::filesystem::create_directories(dir / "art");
  std::ofstream(dir / "art" / "encoder.bin") << "garbage";
  std::ofstream(dir / "art" / "index.bin") << "garbage";
  const auto r = call({"--artifacts-dir", (dir / "art").string(), "retrieve", "--question", "x"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, PipelineEndToEnd) {
  testing::TempDir dir("cli-pipeline");
  const nlohmann::json cfg{
      {"seed", 2},
      {"paths", {{"data_dir", (dir / "data").string()}, {"artifacts_dir", (dir / "art").string()}}},
      {"synth", {{"num_docs", 200}, {"num_queries", 40}, {"pool_size", 8}}},
      {"data", {{"pool_size", 8}}},
      {"reward", {{"epochs", 2}, {"hidden", 16}, {"dim", 8}}},
      {"distill", {{"epochs", 2}, {"dim", 8}}},
      {"miner", {{"threads", 1}}},
      {"eval", {{"latency_queries", 3}, {"latency_repetitions", 1}}}};
  std::ofstream(dir / "config.json") << cfg.dump(2);
  const std::string config = (dir / "config.json").string();
  for (const char* stage : {"synth", "ingest", "score-utility", "train-reward", "mine",
                            "train-retriever", "build-index", "retrieve", "evaluate", "bench"}) {
    const auto r = call({"--config", config, stage});
    ASSERT_EQ(r.code, 0) << stage << ": " << r.err;
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "art" / "run.jsonl"));
  EXPECT_TRUE(std::filesystem::exists(dir / "art" / "bench.json"));
  const auto r = call({"--config", config, "retrieve", "--question", "what is it", "--k", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["results"].size(), 3u);
  EXPECT_TRUE(j.contains("latency_ms"));
  EXPECT_EQ(call({"--config", config, "retrieve", "--question", "x", "--k", "0"}).code, 1);
}

#ifdef UAE_CLI_PATH
TEST(CliBinary, ProcessExitCodes) {
  auto status = [](const std::string& args) {
    const int raw = std::system((std::string(UAE_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("--help"), 0);
  EXPECT_EQ(status("frobnicate"), 1);
  testing::TempDir dir("cli-bin");
  EXPECT_EQ(status("--data-dir " + (dir / "d").string() + " ingest"), 1);
}
#endif

}  // namespace
}  // namespace uae::cli
