/*
 * Copyright 2026 The callprobe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "test_util.h"

namespace {

using ::callprobe::testing::ScopedTempDir;

// Exit status of the command-line tool run with `args`; output discarded.
int RunCli(const std::string& args) {
  const std::string cmd = std::string(CALLPROBE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, SynthTrainReport) {
  ScopedTempDir dir;
  const std::string d = dir.path().string();
  ASSERT_EQ(RunCli("synth --out-dir " + d + " --per-class 20 --dim 6"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "spec.json"));
  ASSERT_EQ(RunCli("train --spec " + d + "/spec.json -j 2"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "results" / "summary.txt"));
  EXPECT_EQ(RunCli("report --results " + d + "/results/results.json --out-dir " + d + "/rep"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "rep" / "summary.csv"));
}

TEST(CliTest, LayerwiseWritesCsv) {
  ScopedTempDir dir;
  const std::string d = dir.path().string();
  ASSERT_EQ(RunCli("synth --out-dir " + d + " --per-class 15 --dim 4 --layers 3 --separable-layer 1"), 0);
  ASSERT_EQ(RunCli("layerwise --spec " + d + "/spec.json --csv " + d + "/l.csv"), 0);
  std::ifstream in(dir / "l.csv");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 5);
}

TEST(CliTest, InvalidSpecExitsWithTwo) {
  ScopedTempDir dir;
  const std::string d = dir.path().string();
  EXPECT_EQ(RunCli("train --spec " + d + "/absent.json"), 2);
  std::ofstream(dir / "bad.json") << R"({"store": "x.embs", "fold_plan": "f.json", "epochs": 3})";
  EXPECT_EQ(RunCli("train --spec " + d + "/bad.json"), 2);
  std::ofstream(dir / "nofiles.json") << R"({"store": "x.embs", "fold_plan": "f.json"})";
  EXPECT_EQ(RunCli("train --spec " + d + "/nofiles.json"), 2);
  EXPECT_EQ(RunCli("train"), 2);
  EXPECT_EQ(RunCli("frobnicate"), 2);
}

TEST(CliTest, PartialFailureExitsWithOne) {
  ScopedTempDir dir;
  const std::string d = dir.path().string();
  ASSERT_EQ(RunCli("synth --out-dir " + d + " --per-class 10 --dim 4"), 0);
  // Mark the store non-temporal so the recurrent family cannot run on it.
  std::ifstream in(dir / "synth.json");
  std::string manifest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  const auto pos = manifest.find("\"temporal\": true");
  ASSERT_NE(pos, std::string::npos);
  manifest.replace(pos, 16, "\"temporal\": false");
  std::ofstream(dir / "synth.json") << manifest;
  std::ofstream(dir / "mixed.json")
      << R"({"store": "synth.embs", "fold_plan": "folds.json", "families": ["lr", "gru"],
            "grid": {"learning_rate": [0.01]}, "output_dir": "mixed"})";
  EXPECT_EQ(RunCli("train --spec " + d + "/mixed.json"), 1);
  EXPECT_TRUE(std::filesystem::exists(dir / "mixed" / "results.json"));
}

}  // namespace
