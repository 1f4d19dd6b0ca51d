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

#include "motkit/simplex.h"
#include "test_support.h"

namespace motkit {
namespace {

using testing::Rng;

StandardFormLP make_lp(std::vector<Vec> rows, Vec b, Vec c) {
  StandardFormLP lp;
  lp.A.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(c.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t j = 0; j < c.size(); ++j) lp.A(r, j) = rows[r][j];
  }
  lp.b = std::move(b);
  lp.c = std::move(c);
  return lp;
}

TEST(LpSolve, SmallOptimum) {
  // min -x1 - 2 x2 with x1 + x2 <= 4 and x1 + 3 x2 <= 6.
  const StandardFormLP lp =
      make_lp({{1, 1, 1, 0}, {1, 3, 0, 1}}, {4, 6}, {-1, -2, 0, 0});
  const LpSolution s = lp_solve(lp);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.value, -5.0, 1e-12);
  EXPECT_NEAR(s.x[0], 3.0, 1e-12);
  EXPECT_NEAR(s.x[1], 1.0, 1e-12);
}

TEST(LpSolve, DetectsInfeasibility) {
  const StandardFormLP lp = make_lp({{1, 1}}, {-1}, {1, 1});
  EXPECT_EQ(lp_solve(lp).status, LpStatus::kInfeasible);
}

TEST(LpSolve, DetectsUnboundedness) {
  const StandardFormLP lp = make_lp({{1, -1}}, {0}, {-1, 0});
  EXPECT_EQ(lp_solve(lp).status, LpStatus::kUnbounded);
}

// A classic degenerate instance on which the textbook largest-coefficient
// rule cycles. Optimum -1/20.
TEST(LpSolve, TerminatesOnCyclingExample) {
  const StandardFormLP lp = make_lp(
      {{1, 0, 0, 0.25, -60, -1.0 / 25, 9},
       {0, 1, 0, 0.5, -90, -1.0 / 50, 3},
       {0, 0, 1, 0, 0, 1, 0}},
      {0, 0, 1}, {0, 0, 0, -0.75, 150, -1.0 / 50, 6});
  for (PricingRule rule : {PricingRule::kBland, PricingRule::kDantzigThenBland}) {
    SimplexOptions o;
    o.rule = rule;
    const LpSolution s = lp_solve(lp, o);
    ASSERT_EQ(s.status, LpStatus::kOptimal);
    EXPECT_NEAR(s.value, -0.05, 1e-12);
  }
}

TEST(LpSolve, DualsCertifyOptimality) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3;
    const int n = 7;
    std::vector<Vec> rows(m, Vec(n));
    for (auto& r : rows) {
      for (double& x : r) x = testing::uniform(rng, 0.1, 1.0);
    }
    // b = A x0 for some x0 >= 0 keeps the program feasible; A > 0 bounds it.
    Vec b(m, 0.0);
    for (int j = 0; j < n; ++j) {
      const double x0 = testing::uniform(rng);
      for (int r = 0; r < m; ++r) b[r] += rows[r][j] * x0;
    }
    Vec c(n);
    for (double& x : c) x = testing::uniform(rng, -1.0, 1.0);
    const LpSolution s = lp_solve(make_lp(rows, b, c));
    ASSERT_EQ(s.status, LpStatus::kOptimal);
    double dual_obj = 0.0;
    for (int r = 0; r < m; ++r) dual_obj += s.duals[r] * b[r];
    EXPECT_NEAR(dual_obj, s.value, 1e-9);
    for (int j = 0; j < n; ++j) {
      double red = c[j];
      for (int r = 0; r < m; ++r) red -= s.duals[r] * rows[r][j];
      EXPECT_GE(red, -1e-9);
    }
  }
}

TEST(RevisedSimplex, ColumnsAppendedBetweenSolves) {
  RevisedSimplex rs(Vec{1.0, 1.0});
  rs.add_column({{0, 1}, {1.0, 1.0}}, 5.0);
  LpSolution s1 = rs.solve();
  ASSERT_EQ(s1.status, LpStatus::kOptimal);
  EXPECT_NEAR(s1.value, 5.0, 1e-12);
  rs.add_column({{0}, {1.0}}, 1.0);
  rs.add_column({{1}, {1.0}}, 1.0);
  const LpSolution s2 = rs.solve();
  ASSERT_EQ(s2.status, LpStatus::kOptimal);
  EXPECT_NEAR(s2.value, 2.0, 1e-12);
  EXPECT_EQ(rs.columns(), 3);
}

// Reference values computed independently with scipy's HiGHS solver.
TEST(BruteForceMot, MatchesReference) {
  const DenseTensor t(2, 2, Vec{0.0, 1.0, 1.0, 0.0});
  EXPECT_NEAR(brute_force_mot(t, Marginals::uniform(2, 2)).first, 0.0, 1e-12);
  const DenseTensor g = DenseTensor::from_function(3, 3, [](const Tuple& j) {
    const auto sq = [](int d) { return static_cast<double>(d * d); };
    return sq(j[0] - j[1]) + sq(j[1] - j[2]);
  });
  const Marginals m({{0.2, 0.3, 0.5}, {0.4, 0.4, 0.2}, {0.1, 0.6, 0.3}});
  const auto [value, plan] = brute_force_mot(g, m);
  EXPECT_NEAR(value, 0.9, 1e-9);
  EXPECT_TRUE(check_feasible(plan, m, 1e-9));
  EXPECT_LE(plan.nnz(), vertex_sparsity_bound(3, 3));
}

}  // namespace
}  // namespace motkit
