/*
 * Copyright 2026 The fairaudit Authors.
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

// Black-box tests of the fairaudit executable. FAIRAUDIT_CLI is the path of
// the built binary.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult RunCli(const std::string& args) {
  const std::string cmd = std::string(FAIRAUDIT_CLI) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) {
    r.output += buf.data();
  }
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fairaudit_cli_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }

  fs::path dir_;
};

TEST_F(CliTest, SynthWritesHeaderPlusRowsDeterministically) {
  ASSERT_EQ(RunCli("synth --out " + Path("a.csv") + " --rows 1000 --seed 3")
                .exit_code,
            0);
  ASSERT_EQ(RunCli("synth --out " + Path("b.csv") + " --rows 1000 --seed 3")
                .exit_code,
            0);
  const std::string a = ReadFile(Path("a.csv"));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1001);
  EXPECT_EQ(a, ReadFile(Path("b.csv")));
}

TEST_F(CliTest, ValidateSummarizes) {
  ASSERT_EQ(RunCli("synth --out " + Path("d.csv") + " --rows 200").exit_code, 0);
  const RunResult r = RunCli("validate --data " + Path("d.csv"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("rows: 200"), std::string::npos);
  EXPECT_NE(r.output.find("columns: 23"), std::string::npos);
}

TEST_F(CliTest, ValidateHeaderOnly) {
  ASSERT_EQ(RunCli("synth --out " + Path("d.csv") + " --rows 5").exit_code, 0);
  const std::string csv = ReadFile(Path("d.csv"));
  WriteFile(Path("h.csv"), csv.substr(0, csv.find('\n') + 1));
  const RunResult r = RunCli("validate --data " + Path("h.csv"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("rows: 0"), std::string::npos);
}

TEST_F(CliTest, MissingColumnIsInputError) {
  ASSERT_EQ(RunCli("synth --out " + Path("d.csv") + " --rows 5").exit_code, 0);
  // Drop the PAY_AMT3 column from every line.
  std::istringstream in(ReadFile(Path("d.csv")));
  std::string line, csv;
  int drop = -1;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (drop < 0) {
      drop = static_cast<int>(std::find(cells.begin(), cells.end(), "PAY_AMT3") -
                              cells.begin());
      ASSERT_LT(drop, static_cast<int>(cells.size()));
    }
    cells.erase(cells.begin() + drop);
    for (std::size_t k = 0; k < cells.size(); ++k) {
      csv += (k ? "," : "") + cells[k];
    }
    csv += "\n";
  }
  WriteFile(Path("bad.csv"), csv);
  const RunResult r = RunCli("validate --data " + Path("bad.csv"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("PAY_AMT3"), std::string::npos) << r.output;
}

TEST_F(CliTest, MissingFileAndBadFlags) {
  EXPECT_EQ(RunCli("validate --data " + Path("none.csv")).exit_code, 2);
  EXPECT_EQ(RunCli("audit --data x.csv --out y --bogus").exit_code, 2);
  EXPECT_EQ(RunCli("leakage --data x.csv --out y --model svm").exit_code, 2);
  EXPECT_EQ(RunCli("").exit_code, 2);
}

TEST_F(CliTest, AuditSubsetOfConfigs) {
  ASSERT_EQ(RunCli("synth --out " + Path("d.csv") + " --rows 600 --alpha 1")
                .exit_code,
            0);
  WriteFile(Path("hp.txt"),
            "lr.max_epochs = 100\ngbt.n_trees = 5\ngbt.max_depth = 2\n");
  const RunResult r = RunCli("audit --data " + Path("d.csv") + " --out " +
                          Path("out") + " --configs 1,3 --hp " + Path("hp.txt"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  for (const char* f : {"audit.json", "metrics.csv", "shap_financial.csv",
                        "divergence.csv", "leakage_financial.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  const auto j = nlohmann::json::parse(ReadFile(dir_ / "out" / "audit.json"));
  ASSERT_EQ(j["configs"].size(), 2u);
  EXPECT_EQ(j["configs"][0]["id"], 1);
  EXPECT_EQ(j["configs"][1]["id"], 3);
  EXPECT_EQ(j["invocation"]["command"], "audit");

  EXPECT_EQ(RunCli("audit --data " + Path("d.csv") + " --out " + Path("o2") +
                " --configs 0")
                .exit_code,
            2);
  EXPECT_EQ(RunCli("audit --data " + Path("d.csv") + " --out " + Path("o3") +
                " --configs 1,x")
                .exit_code,
            2);
}

TEST_F(CliTest, LeakageWritesRankedProxies) {
  ASSERT_EQ(RunCli("synth --out " + Path("d.csv") + " --rows 3000 --alpha 2")
                .exit_code,
            0);
  const RunResult r = RunCli("leakage --data " + Path("d.csv") + " --out " +
                          Path("lk") + " --model lr --feature-set fin");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto j = nlohmann::json::parse(ReadFile(dir_ / "lk" / "leakage.json"));
  EXPECT_EQ(j["proxies"].size(), 19u);
  EXPECT_EQ(j["proxies"][0]["feature"], "LIMIT_BAL");
  EXPECT_GT(j["auc"].get<double>(), 0.85);
}

}  // namespace
