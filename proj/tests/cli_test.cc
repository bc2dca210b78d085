//
// Copyright 2026 The msdp Authors.
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
//

#include "msdp/cli.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace msdp::cli {
namespace {

using ::testing::HasSubstr;
using Json = nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "msdp");
  std::ostringstream out;
  std::ostringstream err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::path(::testing::TempDir()) /
           ::testing::UnitTest::GetInstance()->current_test_info()->name();
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

TEST_F(CliTest, LineSevenToStdout) {
  const Result r = Invoke({"line", "--eps", "1", "--k", "7"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  const std::vector<double> a = j["offsets"];
  const double l43 = 2 * std::log(4.0 / 3.0);
  const double l2 = 2 * std::log(2.0);
  const double l4 = 2 * std::log(4.0);
  const std::vector<double> want = {-l4, -l2, -l43, 0.0, l43, l2, l4};
  ASSERT_EQ(a.size(), 7u);
  for (int i = 0; i < 7; ++i) EXPECT_NEAR(a[i], want[i], 1e-12);
  EXPECT_NEAR(j["cost"].get<double>(), 0.25, 1e-9);
  EXPECT_EQ(j["method"], "closed");
  EXPECT_LE(j["median_residual_max"].get<double>(), 1e-9);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Invoke({"line", "--eps", "1", "--k", "0"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"line", "--eps", "-1", "--k", "3"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"line", "--k", "3"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"bogus"}).code, kExitUsage);
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  const Result r = Invoke({"dual", "--eps", "1", "--zeta", "2", "--lambda",
                           "0.4", "--v", "0"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, HelpAndVersion) {
  const Result help = Invoke({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_THAT(help.out, HasSubstr("ring-local"));
  const Result line_help = Invoke({"line", "--help"});
  EXPECT_EQ(line_help.code, kExitOk);
  EXPECT_THAT(line_help.out, HasSubstr("--method"));
  EXPECT_THAT(Invoke({"--version"}).out, HasSubstr(kToolVersion));
}

TEST_F(CliTest, ManifestListsOutputs) {
  const std::string out = Path("ring.json");
  const Result r = Invoke({"ring-local", "--eps", "1", "--k", "5", "--out", out,
                           "--seed", "42"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(ReadFile(out));
  EXPECT_NEAR(j["cost"].get<double>(), 0.2372158, 1e-7);
  EXPECT_TRUE(j["privacy_ok"].get<bool>());
  EXPECT_TRUE(std::filesystem::exists(Path("ring.csv")));

  const Json m = Json::parse(ReadFile(out + ".manifest.json"));
  EXPECT_EQ(m["seed"], 42);
  EXPECT_EQ(m["tool_version"], kToolVersion);
  EXPECT_THAT(m["command_line"].get<std::string>(), HasSubstr("ring-local"));
  ASSERT_EQ(m["outputs"].size(), 2u);
  for (const Json& e : m["outputs"]) {
    EXPECT_EQ(e["sha256"].get<std::string>().size(), 64u);
    EXPECT_TRUE(std::filesystem::exists(e["path"].get<std::string>()));
  }
}

TEST_F(CliTest, ReproDualFigures) {
  const Result r46 = Invoke({"repro", "--figure", "dual46", "--out", Path("d46.csv")});
  ASSERT_EQ(r46.code, kExitOk) << r46.err;
  std::istringstream in(ReadFile(Path("d46.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "r,nu");
  double last_r = 0.0;
  double last_nu = 0.0;
  while (std::getline(in, line)) {
    const size_t comma = line.find(',');
    last_r = std::stod(line.substr(0, comma));
    last_nu = std::stod(line.substr(comma + 1));
  }
  EXPECT_GT(last_r, 0.0);
  EXPECT_LT(last_nu, -1e50);

  const Result dual = Invoke({"dual", "--eps", "1", "--zeta", "0.1", "--lambda",
                              "0.46", "--v=-1.3862943611198906,0,1.3862943611198906"});
  ASSERT_EQ(dual.code, kExitOk) << dual.err;
  EXPECT_THAT(dual.out, HasSubstr("r,nu"));
}

TEST_F(CliTest, DualSummaryOnStdout) {
  const Result r = Invoke({"dual", "--eps", "1", "--zeta", "0.1", "--lambda",
                           "0.4", "--v=-1.3862943611198906,0,1.3862943611198906",
                           "--out", Path("d40.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json s = Json::parse(r.out);
  EXPECT_EQ(s["right_tail"], "NonnegativeTail");
  EXPECT_EQ(s["left_tail"], "NonpositiveTail");
  EXPECT_TRUE(s["valid"].get<bool>());
  EXPECT_THAT(ReadFile(Path("d40.csv")), ::testing::StartsWith("r,nu\n"));
}

TEST_F(CliTest, VerifyPasses) {
  const Result r = Invoke({"verify", "--target", "line", "--eps", "1", "--k", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["checks"].size(), 4u);
}

TEST_F(CliTest, MhrTable) {
  const Result r = Invoke({"mhr", "--dist", "halfnormal", "--kmax", "8"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, HasSubstr("K,phi,bound,ratio\n1,"));
}

TEST_F(CliTest, SimulateIsReproducible) {
  const std::vector<std::string> base = {"simulate", "--mech", "line", "--eps",
                                         "1", "--k", "3", "--n", "5000"};
  std::vector<std::string> a = base;
  a.insert(a.end(), {"--seed", "7", "--log", Path("a.ndjson")});
  std::vector<std::string> b = base;
  b.insert(b.end(), {"--seed", "7", "--log", Path("b.ndjson"), "--threads", "2"});
  const Result ra = Invoke(a);
  const Result rb = Invoke(b);
  ASSERT_EQ(ra.code, kExitOk) << ra.err;
  ASSERT_EQ(rb.code, kExitOk) << rb.err;
  EXPECT_EQ(ra.out, rb.out);
  EXPECT_EQ(ReadFile(Path("a.ndjson")), ReadFile(Path("b.ndjson")));
  EXPECT_FALSE(ReadFile(Path("a.ndjson")).empty());
}

TEST_F(CliTest, SeedFromEnvironment) {
  const std::vector<std::string> args = {"simulate", "--eps", "1", "--k", "2",
                                         "--n", "3000"};
  setenv("MSDP_SEED", "123", 1);
  const Result a = Invoke(args);
  const Result b = Invoke({"simulate", "--eps", "1", "--k", "2", "--n", "3000",
                           "--seed", "123"});
  unsetenv("MSDP_SEED");
  const Result c = Invoke(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

}  // namespace
}  // namespace msdp::cli
