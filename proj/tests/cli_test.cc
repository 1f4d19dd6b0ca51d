// Copyright 2026 The motkit Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.h"
#include "motkit/io.h"
#include "test_support.h"

namespace motkit::cli {
namespace {

using motkit::testing::data_path;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "motkit");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("motkit_cli_test_" + name)).string();
}

TEST(Cli, SolveDenseGivesZero) {
  const Outcome o = run_cli({"solve", data_path("dense_2x2.json")});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const Json j = Json::parse(o.out);
  EXPECT_NEAR(j["value"].get<double>(), 0.0, 1e-12);
  EXPECT_EQ(j["status"], "optimal");
  EXPECT_EQ(j["plan"]["kind"], "sparse");
}

TEST(Cli, SolveGraphicalMatchesReference) {
  // The file asks for eps = 0.05; the command line overrides it.
  for (const char* engine : {"colgen", "mwu", "sinkhorn"}) {
    const Outcome o = run_cli(
        {"solve", data_path("graphical_chain.json"), "--engine", engine, "--eps", "0.2"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const double v = Json::parse(o.out)["value"].get<double>();
    EXPECT_GE(v, 0.9 - 1e-9) << engine;
    EXPECT_LE(v, 0.9 + 0.2) << engine;
  }
}

TEST(Cli, SolveLowRankWithinEps) {
  for (const char* engine : {"sinkhorn", "mwu"}) {
    const Outcome o = run_cli({"solve", data_path("lowrank_small.json"), "--engine", engine});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const double v = Json::parse(o.out)["value"].get<double>();
    EXPECT_GE(v, 0.172 - 1e-9) << engine;
    EXPECT_LE(v, 0.172 + 0.1) << engine;
  }
  const Outcome cg = run_cli({"solve", data_path("lowrank_small.json"), "--engine", "colgen"});
  EXPECT_EQ(cg.code, kExitError);
}

TEST(Cli, SinkhornOnReliabilityRejected) {
  const Outcome o = run_cli({"solve", data_path("series_connected.json"), "--engine", "sinkhorn"});
  EXPECT_EQ(o.code, kExitError);
  EXPECT_NE(o.err.find("SMIN set oracle unavailable"), std::string::npos) << o.err;
}

TEST(Cli, MalformedJsonIsAnError) {
  const std::string path = temp_path("bad.json");
  std::ofstream(path) << "{\n  \"structure\": \"dense\",\n  \"n\": 2\n  \"k\": 2\n}\n";
  const Outcome o = run_cli({"solve", path});
  EXPECT_EQ(o.code, kExitError);
  EXPECT_NE(o.err.find("line 4"), std::string::npos) << o.err;
  std::filesystem::remove(path);
}

TEST(Cli, MissingFileAndBadFlags) {
  EXPECT_EQ(run_cli({"solve", "/nonexistent.json"}).code, kExitError);
  EXPECT_EQ(run_cli({"solve", data_path("dense_2x2.json"), "--engine", "simplex"}).code,
            kExitError);
  EXPECT_EQ(run_cli({"solve", data_path("dense_2x2.json"), "--eps", "-1"}).code, kExitError);
  EXPECT_EQ(run_cli({}).code, kExitError);
  EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
}

TEST(Cli, DeterministicOutput) {
  for (const char* engine : {"sinkhorn", "mwu"}) {
    const std::vector<std::string> args = {"solve", data_path("lowrank_small.json"),
                                           "--engine", engine, "--seed", "3"};
    const Outcome a = run_cli(args);
    const Outcome b = run_cli(args);
    ASSERT_EQ(a.code, kExitOk);
    EXPECT_EQ(a.out, b.out) << engine;
  }
  const std::vector<std::string> cg = {"solve", data_path("graphical_chain.json")};
  EXPECT_EQ(run_cli(cg).out, run_cli(cg).out);
}

TEST(Cli, OutFileMatchesStdout) {
  const std::string path = temp_path("out.json");
  const Outcome a = run_cli({"solve", data_path("dense_2x2.json"), "--out", path});
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_TRUE(a.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), run_cli({"solve", data_path("dense_2x2.json")}).out);
  std::filesystem::remove(path);
}

TEST(Cli, EulerFlowWritesCsvAndJson) {
  const std::string json = temp_path("euler.json");
  const std::string csv = temp_path("euler.csv");
  const Outcome o = run_cli({"eulerflow", "--n", "5", "--k", "3", "--sigma", "reverse", "--out",
                             json});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  std::ifstream jf(json);
  const Json j = Json::parse(jf);
  EXPECT_NEAR(j["value"].get<double>(), 0.375, 1e-9);
  std::ifstream cf(csv);
  std::string header;
  std::getline(cf, header);
  EXPECT_EQ(header, "t,j_from,j_to,mass");
  int rows = 0;
  for (std::string line; std::getline(cf, line);) ++rows;
  EXPECT_GT(rows, 0);
  std::filesystem::remove(json);
  std::filesystem::remove(csv);
  const Outcome id = run_cli({"eulerflow", "--n", "4", "--k", "3", "--sigma", "identity"});
  ASSERT_EQ(id.code, kExitOk);
  EXPECT_NEAR(Json::parse(id.out)["value"].get<double>(), 0.0, 1e-12);
}

TEST(Cli, ReliabilityBothModes) {
  const Outcome best = run_cli({"reliability", data_path("series_graph.json"), "--mode", "best"});
  ASSERT_EQ(best.code, kExitOk) << best.err;
  EXPECT_NEAR(Json::parse(best.out)["probability"].get<double>(), 0.7, 1e-9);
  const Outcome worst =
      run_cli({"reliability", data_path("series_graph.json"), "--mode", "worst"});
  ASSERT_EQ(worst.code, kExitOk);
  EXPECT_NEAR(Json::parse(worst.out)["probability"].get<double>(), 0.5, 1e-9);
  EXPECT_EQ(run_cli({"reliability", data_path("series_graph.json")}).code, kExitError);
}

TEST(Cli, RiskAndProject) {
  const Outcome r = run_cli({"risk", data_path("risk_small.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const double v = Json::parse(r.out)["value"].get<double>();
  EXPECT_GE(v, 1.62 - 1e-9);
  EXPECT_LE(v, 1.62 + 0.1);
  const Outcome p = run_cli({"project", data_path("projection_small.json")});
  ASSERT_EQ(p.code, kExitOk) << p.err;
  const Json pj = Json::parse(p.out);
  EXPECT_LE(pj["objective"].get<double>(), 0.0675 + 0.2);
  EXPECT_GE(pj["objective"].get<double>(), 0.0675 - 1e-9);
}

TEST(Cli, Selftest) {
  const Outcome o = run_cli({"selftest"});
  EXPECT_EQ(o.code, kExitOk) << o.out;
  EXPECT_EQ(o.out.find("FAIL"), std::string::npos);
}

}  // namespace
}  // namespace motkit::cli
