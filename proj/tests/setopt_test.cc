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

#include "motkit/setopt.h"
#include "test_support.h"

namespace motkit {
namespace {

using testing::Rng;

UGraph random_connected_graph(Rng& rng, int vertices, int extra) {
  UGraph g;
  g.vertices = vertices;
  for (int v = 1; v < vertices; ++v) g.edges.push_back({testing::uniform_int(rng, 0, v - 1), v});
  for (int e = 0; e < extra; ++e) {
    const int u = testing::uniform_int(rng, 0, vertices - 1);
    int v = testing::uniform_int(rng, 0, vertices - 2);
    if (v >= u) ++v;
    g.edges.push_back({u, v});
  }
  return g;
}

// Minimum of sum x_e over present edges among edge sets whose connectivity
// equals `want_connected`, by enumeration.
double brute_subgraph(const UGraph& g, const Vec& x, bool want_connected) {
  const int m = static_cast<int>(g.edges.size());
  double best = kInf;
  for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
    std::vector<char> keep(m);
    double w = 0.0;
    for (int e = 0; e < m; ++e) {
      keep[e] = (mask >> e) & 1;
      if (keep[e]) w += x[e];
    }
    if (is_connected(g, keep) == want_connected) best = std::min(best, w);
  }
  return best;
}

TEST(ExplicitSet, OraclesMatchEnumeration) {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = testing::uniform_int(rng, 1, 4);
    const int k = testing::uniform_int(rng, 1, 4);
    const std::vector<Tuple> members = testing::random_members(rng, n, k);
    const SetOracle s = make_explicit_set_oracle(n, k, members);
    const StructuredCost sc = make_setopt_cost(s);
    const auto c = [&s](const Tuple& t) { return s.contains(t) ? 0.0 : 1.0; };
    const DualWeights p = testing::random_weights(rng, n, k, 0.8);
    const double mn = testing::brute_min(c, n, k, p);
    EXPECT_NEAR(sc.min(p), mn, 1e-12);
    const OracleAnswerArg a = sc.argmin(p);
    EXPECT_NEAR(c(a.tuple) - p.sum_at(a.tuple), mn, 1e-12);
    const double eta = std::exp(testing::uniform(rng, 0.0, 4.0));
    const double sm = testing::brute_smin(c, n, k, p, eta);
    EXPECT_NEAR(sc.smin(p, eta), sm, 1e-9 * (1.0 + std::abs(sm)));
  }
}

TEST(ExplicitSet, EmptySetHasInfiniteMin) {
  const SetOracle s = make_explicit_set_oracle(2, 2, {});
  EXPECT_EQ(s.min(DualWeights::zeros(2, 2)), kInf);
  // C is then identically 1.
  const StructuredCost sc = make_setopt_cost(s);
  EXPECT_NEAR(sc.min(DualWeights::zeros(2, 2)), 1.0, 1e-15);
}

TEST(SetOpt, CombineHandlesNegativeInfinity) {
  const SetOracle s = make_explicit_set_oracle(2, 2, {{0, 0}});
  std::vector<Vec> rows = {{-kInf, 0.0}, {0.0, 0.0}};
  const DualWeights p(rows);
  // Only tuples starting with 1 are allowed; none of them is in S, so the
  // minimum is C = 1 at (1, 0) or (1, 1).
  EXPECT_NEAR(setopt_min(s, p), 1.0, 1e-15);
  EXPECT_NEAR(setopt_smin(s, p, 50.0), 1.0 - std::log(2.0) / 50.0, 1e-12);
}

TEST(SetOpt, MissingSminIsReported) {
  SetOracle s = make_explicit_set_oracle(2, 2, {{0, 0}});
  s.smin = nullptr;
  const StructuredCost sc = complete_oracles(make_setopt_cost(s));
  EXPECT_FALSE(sc.supports(Oracle::kSMin));
  EXPECT_FALSE(sc.supports(Oracle::kMarg));
  try {
    setopt_smin(s, DualWeights::zeros(2, 2), 1.0);
    FAIL() << "expected CapabilityError";
  } catch (const CapabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("SMIN set oracle unavailable"), std::string::npos);
  }
}

TEST(StoerWagner, MatchesEnumeratedCuts) {
  Rng rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    const int vertices = testing::uniform_int(rng, 2, 6);
    const UGraph g = random_connected_graph(rng, vertices, testing::uniform_int(rng, 0, 5));
    Vec w(g.edges.size());
    for (double& x : w) x = testing::uniform(rng, 0.0, 2.0);
    double best = kInf;
    for (std::uint64_t mask = 1; mask + 1 < (1ULL << vertices); ++mask) {
      double cut = 0.0;
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (((mask >> g.edges[e].u) & 1) != ((mask >> g.edges[e].v) & 1)) cut += w[e];
      }
      best = std::min(best, cut);
    }
    const MinCut mc = stoer_wagner_mincut(g, w);
    EXPECT_NEAR(mc.value, best, 1e-12);
    double shore = 0.0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      if (mc.side[g.edges[e].u] != mc.side[g.edges[e].v]) shore += w[e];
    }
    EXPECT_NEAR(shore, mc.value, 1e-12);
  }
}

TEST(GraphSubsets, MinWeightMatchesEnumeration) {
  Rng rng(47);
  for (int trial = 0; trial < 80; ++trial) {
    const int vertices = testing::uniform_int(rng, 2, 5);
    const UGraph g = random_connected_graph(rng, vertices, testing::uniform_int(rng, 0, 4));
    Vec x(g.edges.size());
    for (double& v : x) v = testing::uniform(rng, -1.0, 1.0);
    const SubgraphAnswer con = min_weight_connected_subgraph(g, x);
    EXPECT_NEAR(con.value, brute_subgraph(g, x, true), 1e-12);
    EXPECT_TRUE(is_connected(g, con.edges));
    const SubgraphAnswer dis = min_weight_disconnected_subgraph(g, x);
    EXPECT_NEAR(dis.value, brute_subgraph(g, x, false), 1e-12);
    EXPECT_FALSE(is_connected(g, dis.edges));
  }
}

TEST(GraphSubsets, InfeasibleCases) {
  UGraph split;
  split.vertices = 3;
  split.edges = {{0, 1}};
  EXPECT_THROW(min_weight_connected_subgraph(split, Vec{0.5}), InfeasibleError);
  UGraph single;
  single.vertices = 1;
  EXPECT_THROW(min_weight_disconnected_subgraph(single, Vec{}), InfeasibleError);
}

TEST(GraphSubsets, ValidatesGraph) {
  UGraph g;
  g.vertices = 2;
  g.edges = {{0, 2}};
  EXPECT_THROW(validate_graph(g), InvalidArgument);
}

}  // namespace
}  // namespace motkit
