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
#include <cstdlib>

#include "motkit/core.h"
#include "test_support.h"

namespace motkit {
namespace {

using testing::Rng;

TEST(LinearIndex, LastCoordinateVariesFastest) {
  EXPECT_EQ(linear_index({0, 0, 1}, 3), 1u);
  EXPECT_EQ(linear_index({1, 0, 0}, 3), 9u);
  EXPECT_EQ(linear_index({2, 1, 0}, 3), 21u);
  for (std::uint64_t i = 0; i < 27; ++i) {
    EXPECT_EQ(linear_index(tuple_from_index(i, 3, 3), 3), i);
  }
}

TEST(NextTuple, VisitsEveryTupleOnce) {
  Tuple t(3, 0);
  std::uint64_t count = 0;
  do {
    EXPECT_EQ(linear_index(t, 2), count);
    ++count;
  } while (next_tuple(t, 2));
  EXPECT_EQ(count, 8u);
  EXPECT_EQ(t, Tuple({0, 0, 0}));
}

TEST(CheckedPower, ThrowsAboveCap) {
  EXPECT_EQ(checked_power(3, 4, 100), 81u);
  EXPECT_THROW(checked_power(3, 5, 100), CapExceeded);
  EXPECT_THROW(checked_power(10, 40, brute_force_cap()), CapExceeded);
  EXPECT_THROW(checked_power(0, 2, 100), InvalidArgument);
}

TEST(BruteForceCap, ReadsEnvironment) {
  ASSERT_EQ(setenv("MOTKIT_BRUTE_CAP", "500", 1), 0);
  EXPECT_EQ(brute_force_cap(), 500u);
  EXPECT_THROW(DenseTensor(2, 9), CapExceeded);
  ASSERT_EQ(unsetenv("MOTKIT_BRUTE_CAP"), 0);
  EXPECT_EQ(brute_force_cap(), 1000000u);
}

TEST(LogSumExp, HandlesNegativeInfinity) {
  const Vec v = {-kInf, std::log(2.0), std::log(3.0)};
  EXPECT_NEAR(log_sum_exp(v), std::log(5.0), 1e-15);
  const Vec none = {-kInf, -kInf};
  EXPECT_EQ(log_sum_exp(none), -kInf);
  EXPECT_EQ(log_sum_exp(Vec{}), -kInf);
  const Vec big = {1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(big), 1000.0 + std::log(2.0), 1e-12);
}

TEST(LogSumAccumulator, MatchesBatch) {
  Rng rng(3);
  Vec v;
  LogSumAccumulator acc;
  for (int i = 0; i < 50; ++i) {
    v.push_back(testing::uniform(rng, -300.0, 300.0));
    acc.add(v.back());
  }
  EXPECT_NEAR(acc.value(), log_sum_exp(v), 1e-12);
}

TEST(Softmin, RejectsBadInput) {
  EXPECT_THROW(softmin(Vec{1.0}, 0.0), InvalidArgument);
  EXPECT_THROW(softmin(Vec{}, 1.0), InvalidArgument);
  EXPECT_THROW(softmin(Vec{1.0, -kInf}, 1.0), DomainError);
  EXPECT_EQ(softmin(Vec{kInf, kInf}, 1.0), kInf);
  EXPECT_DOUBLE_EQ(softmin(Vec{kInf, 2.0}, 5.0), 2.0);
}

// min - log(m) / eta <= smin <= min on random inputs.
TEST(Softmin, SandwichProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const int m = testing::uniform_int(rng, 1, 20);
    const double eta = std::exp(testing::uniform(rng, -3.0, 6.0));
    Vec v(m);
    for (double& x : v) x = testing::uniform(rng, -50.0, 50.0);
    const double mn = *std::min_element(v.begin(), v.end());
    const double s = softmin(v, eta);
    const double slack = 1e-12 * (1.0 + std::abs(mn));
    EXPECT_LE(s, mn + slack);
    EXPECT_GE(s, mn - std::log(static_cast<double>(m)) / eta - slack);
  }
}

TEST(Marginals, ValidatesSums) {
  EXPECT_NO_THROW(Marginals({{0.5, 0.5}, {1.0, 0.0}}));
  EXPECT_THROW(Marginals({{0.5, 0.6}}), InvalidArgument);
  EXPECT_THROW(Marginals({{0.5, 0.5}, {1.0}}), InvalidArgument);
  EXPECT_THROW(Marginals({{1.5, -0.5}}), InvalidArgument);
  EXPECT_THROW(Marginals(std::vector<Vec>{}), InvalidArgument);
  const Marginals u = Marginals::uniform(4, 3);
  EXPECT_EQ(u.n(), 4);
  EXPECT_EQ(u.k(), 3);
  EXPECT_DOUBLE_EQ(u[2][1], 0.25);
}

TEST(DualWeights, AcceptsNegativeInfinityOnly) {
  EXPECT_NO_THROW(DualWeights({{-kInf, 1.0}, {0.0, 2.0}}));
  EXPECT_THROW(DualWeights({{kInf, 1.0}}), InvalidArgument);
  EXPECT_THROW(DualWeights({{std::nan(""), 1.0}}), InvalidArgument);
  EXPECT_THROW(DualWeights({{1e13, 1.0}}), InvalidArgument);
  EXPECT_NO_THROW(DualWeights({{1e13, 1.0}}, kInf));
  const DualWeights p({{1.0, 2.0}, {-3.0, -kInf}});
  EXPECT_DOUBLE_EQ(p.sum_at({1, 0}), -1.0);
  EXPECT_EQ(p.sum_at({1, 1}), -kInf);
  EXPECT_FALSE(p.all_finite());
  EXPECT_DOUBLE_EQ(p.row_max_abs(1), 3.0);
}

TEST(SparsePlan, AccumulatesAndReportsMarginals) {
  SparsePlan p(2, 2);
  p.add({0, 1}, 0.25);
  p.add({0, 1}, 0.25);
  p.add({1, 0}, 0.5);
  EXPECT_EQ(p.nnz(), 2u);
  EXPECT_DOUBLE_EQ(p.total_mass(), 1.0);
  const auto m = p.marginals();
  EXPECT_DOUBLE_EQ(m[0][0], 0.5);
  EXPECT_DOUBLE_EQ(m[1][1], 0.5);
  EXPECT_TRUE(check_feasible(p, Marginals::uniform(2, 2)));
  EXPECT_FALSE(check_feasible(p, Marginals({{0.4, 0.6}, {0.5, 0.5}})));
  EXPECT_THROW(p.add({0, 2}, 0.1), InvalidArgument);
  EXPECT_THROW(p.add({0}, 0.1), InvalidArgument);
  p.scale(2.0);
  EXPECT_DOUBLE_EQ(p.total_mass(), 2.0);
}

TEST(SparsePlan, CostAndEntropy) {
  SparsePlan p(2, 2);
  p.add({0, 0}, 0.5);
  p.add({1, 1}, 0.5);
  EXPECT_DOUBLE_EQ(plan_cost(p, [](const Tuple& t) { return t[0] + 2.0 * t[1]; }), 1.5);
  EXPECT_NEAR(entropy(p), std::log(2.0), 1e-15);
}

// H(P) <= k log n for random probability tensors.
TEST(Entropy, BoundedByKLogN) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = testing::uniform_int(rng, 1, 4);
    const int k = testing::uniform_int(rng, 1, 4);
    DenseTensor t(n, k);
    double s = 0.0;
    for (double& x : t.mutable_values()) {
      x = testing::uniform(rng) < 0.2 ? 0.0 : testing::uniform(rng);
      s += x;
    }
    if (s == 0.0) continue;
    for (double& x : t.mutable_values()) x /= s;
    EXPECT_LE(entropy(t), k * std::log(static_cast<double>(n)) + 1e-12);
    EXPECT_GE(entropy(t), -1e-15);
  }
}

TEST(DenseTensor, MarginalsAndFeasibility) {
  DenseTensor t(2, 2, Vec{0.1, 0.2, 0.3, 0.4});
  const Vec m0 = dense_marginal(t, 0);
  const Vec m1 = dense_marginal(t, 1);
  EXPECT_NEAR(m0[0], 0.3, 1e-15);
  EXPECT_NEAR(m1[1], 0.6, 1e-15);
  EXPECT_TRUE(check_feasible(t, Marginals({{0.3, 0.7}, {0.4, 0.6}})));
  EXPECT_THROW(DenseTensor(2, 2, Vec{1.0}), InvalidArgument);
  EXPECT_DOUBLE_EQ(t.max_abs(), 0.4);
}

TEST(VertexSparsity, Formula) {
  EXPECT_EQ(vertex_sparsity_bound(15, 4), 57u);
  EXPECT_EQ(vertex_sparsity_bound(2, 2), 3u);
}

}  // namespace
}  // namespace motkit
