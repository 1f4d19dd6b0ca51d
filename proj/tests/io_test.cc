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

#include <cmath>

#include "motkit/io.h"
#include "test_support.h"

namespace motkit {
namespace {

using testing::data_path;

std::string error_of(const std::string& text) {
  try {
    load_problem_text(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

TEST(JsonLineIndex, MapsPointersToLines) {
  const std::string text = "{\n  \"a\": 1,\n  \"b\": [\n    2,\n    {\"c\": 3}\n  ]\n}\n";
  const auto lines = json_line_index(text);
  EXPECT_EQ(lines.at(""), 1);
  EXPECT_EQ(lines.at("/a"), 2);
  EXPECT_EQ(lines.at("/b"), 3);
  EXPECT_EQ(lines.at("/b/0"), 4);
  EXPECT_EQ(lines.at("/b/1/c"), 5);
}

TEST(ProblemFile, LoadsEveryStructure) {
  for (const char* name : {"dense_2x2.json", "graphical_chain.json", "series_connected.json",
                           "lowrank_small.json"}) {
    const ProblemFile pf = load_problem_text(read_text_file(data_path(name)));
    EXPECT_EQ(pf.schema_version, kSchemaVersion) << name;
    ASSERT_TRUE(pf.marginals) << name;
    EXPECT_EQ(pf.marginals->k(), pf.k) << name;
  }
  const ProblemFile g = load_problem_text(read_text_file(data_path("graphical_chain.json")));
  ASSERT_TRUE(g.graphical);
  EXPECT_EQ(g.solver.engine.value_or(""), "colgen");
  EXPECT_DOUBLE_EQ(g.solver.eps, 0.05);
  EXPECT_DOUBLE_EQ(problem_cost_at(g, {0, 2, 1}), 4.0 + 1.0);
}

TEST(ProblemFile, ErrorsCarryLineNumbers) {
  const std::string bad_sum =
      "{\n  \"structure\": \"dense\",\n  \"n\": 2,\n  \"k\": 2,\n"
      "  \"marginals\": [[0.5, 0.5], [0.5, 0.6]],\n  \"dense\": {\"values\": [0, 1, 1, 0]}\n}\n";
  EXPECT_NE(error_of(bad_sum).find("line 5"), std::string::npos) << error_of(bad_sum);
  const std::string syntax = "{\n  \"structure\": \"dense\",\n  \"n\": 2\n  \"k\": 2\n}\n";
  EXPECT_NE(error_of(syntax).find("line 4"), std::string::npos) << error_of(syntax);
  const std::string bad_value =
      "{\n  \"structure\": \"dense\",\n  \"n\": 2,\n  \"k\": 2,\n"
      "  \"marginals\": [[0.5, 0.5], [0.5, 0.5]],\n  \"dense\": {\"values\": [0, 1, \"x\", 0]}\n}\n";
  const std::string msg = error_of(bad_value);
  EXPECT_NE(msg.find("line 6"), std::string::npos) << msg;
  EXPECT_NE(msg.find("/dense/values/2"), std::string::npos) << msg;
  const std::string missing = "{\n  \"structure\": \"dense\",\n  \"n\": 2\n}\n";
  EXPECT_NE(error_of(missing).find("k"), std::string::npos);
  const std::string bad_eps =
      "{\n  \"structure\": \"dense\",\n  \"n\": 1,\n  \"k\": 1,\n  \"marginals\": [[1]],\n"
      "  \"dense\": {\"values\": [0]},\n  \"solver\": {\"eps\": 0}\n}\n";
  EXPECT_NE(error_of(bad_eps).find("line 7"), std::string::npos) << error_of(bad_eps);
  const std::string version =
      "{\n  \"schema_version\": 9,\n  \"structure\": \"dense\",\n  \"n\": 1,\n  \"k\": 1\n}\n";
  EXPECT_NE(error_of(version).find("schema version"), std::string::npos);
}

TEST(ProblemFile, SinkhornOnGraphSetRejected) {
  const ProblemFile pf = load_problem_text(read_text_file(data_path("series_connected.json")));
  try {
    problem_cost(pf, Engine::kSinkhorn, 0.1);
    FAIL() << "expected CapabilityError";
  } catch (const CapabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("SMIN set oracle unavailable"), std::string::npos);
  }
}

TEST(ResultFile, SparseRoundTripIsLossless) {
  const ProblemFile pf = load_problem_text(read_text_file(data_path("graphical_chain.json")));
  const SolveReport r = colgen_solve(problem_cost(pf, Engine::kColgen, 0.1), *pf.marginals);
  const ResultFile rf = result_from_report(r, Engine::kColgen, false);
  EXPECT_EQ(rf.wall_time, 0.0);
  const std::string text = dump_json(result_to_json(rf));
  const ResultFile back = result_from_json(Json::parse(text));
  EXPECT_EQ(dump_json(result_to_json(back)), text);
  ASSERT_TRUE(back.plan);
  EXPECT_EQ(back.value, rf.value);
  const double recon = plan_cost(*back.plan, [&pf](const Tuple& t) { return problem_cost_at(pf, t); });
  EXPECT_NEAR(recon, back.value, 1e-7);
  EXPECT_TRUE(check_feasible(*back.plan, *pf.marginals, 1e-7));
}

TEST(ResultFile, ScaledRoundTripIsLossless) {
  const ProblemFile pf = load_problem_text(read_text_file(data_path("graphical_chain.json")));
  const StructuredCost sc = problem_cost(pf, Engine::kSinkhorn, 0.1);
  const SolveReport r = sinkhorn_solve(sc, *pf.marginals, 0.1);
  const ResultFile rf = result_from_report(r, Engine::kSinkhorn, false);
  EXPECT_EQ(rf.lower_bound, -kInf);
  const std::string text = dump_json(result_to_json(rf));
  EXPECT_NE(text.find("\"-inf\""), std::string::npos);
  const ResultFile back = result_from_json(Json::parse(text));
  EXPECT_EQ(back.lower_bound, -kInf);
  EXPECT_EQ(dump_json(result_to_json(back)), text);
  ASSERT_TRUE(back.scaled);
  // Reattach the cost and recompute the value from the stored scalings.
  ScaledPlan sp = *back.scaled;
  sp.cost = std::make_shared<const StructuredCost>(sc);
  const double recon = scaled_plan_cost(sp, [&pf](const Tuple& t) { return problem_cost_at(pf, t); },
                                        1000000);
  EXPECT_NEAR(recon, back.value, 1e-7);
}

TEST(ResultFile, RejectsMalformedPlan) {
  Json j = result_to_json(ResultFile{});
  j["plan"] = {{"kind", "sparse"}, {"n", 2}, {"k", 2},
               {"entries", {{{"index", {0, 5}}, {"mass", 1.0}}}}};
  EXPECT_THROW(result_from_json(j), InvalidArgument);
}

TEST(AppFiles, Reliability) {
  const Json j = Json::parse(read_text_file(data_path("series_graph.json")));
  const ReliabilityProblem pr = reliability_from_json(j, ReliabilityMode::kBest);
  EXPECT_EQ(pr.graph.vertices, 3);
  ASSERT_EQ(pr.q.size(), 2u);
  EXPECT_DOUBLE_EQ(pr.q[1], 0.7);
  const ReliabilityResult r = network_reliability(pr, Engine::kColgen, 0.05);
  const Json rep = reliability_report_json(r, Engine::kColgen);
  EXPECT_EQ(rep["mode"], "best");
  EXPECT_NEAR(rep["probability"].get<double>(), 0.7, 1e-9);
  double mass = 0.0;
  for (const Json& s : rep["support"]) {
    EXPECT_EQ(s["edges"].get<std::string>().size(), 2u);
    mass += s["mass"].get<double>();
  }
  EXPECT_NEAR(mass, 1.0, 1e-9);
  Json bad = j;
  bad["edges"][0]["q"] = 1.5;
  EXPECT_THROW(reliability_from_json(bad, ReliabilityMode::kBest), InvalidArgument);
}

TEST(AppFiles, RiskAndProjection) {
  const RiskProblem rp = risk_from_json(Json::parse(read_text_file(data_path("risk_small.json"))));
  EXPECT_EQ(rp.k, 3);
  EXPECT_DOUBLE_EQ(rp.returns[0][2][0], 1.2);
  const ProjectionProblem pp =
      projection_from_json(Json::parse(read_text_file(data_path("projection_small.json"))));
  EXPECT_DOUBLE_EQ(pp.eps, 0.2);
  EXPECT_EQ(pp.r.rank(), 1);
  ASSERT_EQ(pp.s.entries.size(), 1u);
}

TEST(ReadTextFile, MissingFile) {
  EXPECT_THROW(read_text_file("/nonexistent/motkit.json"), InvalidArgument);
}

}  // namespace
}  // namespace motkit
