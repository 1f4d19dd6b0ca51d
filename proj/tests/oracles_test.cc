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

#include "motkit/oracles.h"
#include "test_support.h"

namespace motkit {
namespace {

using testing::Rng;

DenseTensor random_dense(Rng& rng, int n, int k) {
  DenseTensor t(n, k);
  for (double& x : t.mutable_values()) x = testing::uniform(rng);
  return t;
}

TEST(DenseOracles, MatchEnumeration) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = testing::uniform_int(rng, 1, 4);
    const int k = testing::uniform_int(rng, 1, 4);
    const DenseTensor t = random_dense(rng, n, k);
    const DualWeights p = testing::random_weights(rng, n, k);
    const auto c = [&t](const Tuple& j) { return t.at(j); };
    const double mn = testing::brute_min(c, n, k, p);
    EXPECT_NEAR(min_dense(t, p), mn, 1e-12);
    const OracleAnswerArg a = argmin_dense(t, p);
    EXPECT_NEAR(t.at(a.tuple) - p.sum_at(a.tuple), mn, 1e-12);
    EXPECT_NEAR(a.value, mn, 1e-12);
    const double eta = std::exp(testing::uniform(rng, -1.0, 4.0));
    const double sm = testing::brute_smin(c, n, k, p, eta);
    EXPECT_NEAR(smin_dense(t, p, eta), sm, 1e-9 * (1.0 + std::abs(sm)));
  }
}

TEST(DenseOracles, ArgminBreaksTiesLexicographically) {
  DenseTensor t(2, 2, Vec{1.0, 0.0, 0.0, 1.0});
  const OracleAnswerArg a = argmin_dense(t, DualWeights::zeros(2, 2));
  EXPECT_EQ(a.tuple, Tuple({0, 1}));
}

TEST(DenseOracles, NegativeInfinityForbidsValues) {
  DenseTensor t(2, 2, Vec{0.0, 5.0, 5.0, 5.0});
  const DualWeights p({{-kInf, 0.0}, {0.0, 0.0}});
  const OracleAnswerArg a = argmin_dense(t, p);
  EXPECT_EQ(a.tuple[0], 1);
  EXPECT_DOUBLE_EQ(a.value, 5.0);
}

TEST(DenseOracles, LogMargSumsToPartition) {
  Rng rng(4);
  const DenseTensor t = random_dense(rng, 3, 3);
  std::vector<Vec> log_d(3, Vec(3));
  for (Vec& row : log_d) {
    for (double& x : row) x = testing::uniform(rng, -1.0, 1.0);
  }
  const double eta = 2.5;
  double expected = 0.0;
  Tuple j(3, 0);
  Vec m0(3, 0.0);
  do {
    double w = std::exp(-eta * t.at(j));
    for (int i = 0; i < 3; ++i) w *= std::exp(log_d[i][j[i]]);
    m0[j[0]] += w;
    expected += w;
  } while (next_tuple(j, 3));
  const Vec lm = log_marg_dense(t, log_d, eta, 0);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(std::exp(lm[a]), m0[a], 1e-12);
  EXPECT_NEAR(std::exp(log_sum_exp(lm)), expected, 1e-12);
}

TEST(Reductions, DerivedOraclesAgreeWithNative) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = testing::uniform_int(rng, 2, 3);
    const int k = testing::uniform_int(rng, 2, 3);
    const DenseTensor t = random_dense(rng, n, k);
    StructuredCost min_only(n, k, 1.0, "min-only");
    min_only.set_min([t](const DualWeights& p) { return min_dense(t, p); });
    const StructuredCost full = complete_oracles(min_only);
    EXPECT_TRUE(full.supports(Oracle::kArgMin));
    EXPECT_TRUE(full.supports(Oracle::kAMin));
    EXPECT_TRUE(full.supports(Oracle::kArgAMin));
    EXPECT_FALSE(full.supports(Oracle::kSMin));
    EXPECT_FALSE(full.supports(Oracle::kMarg));
    const DualWeights p = testing::random_weights(rng, n, k);
    const OracleAnswerArg a = full.argmin(p);
    EXPECT_NEAR(t.at(a.tuple) - p.sum_at(a.tuple), min_dense(t, p), 1e-9);

    StructuredCost smin_only(n, k, 1.0, "smin-only");
    smin_only.set_smin([t](const DualWeights& q, double eta) { return smin_dense(t, q, eta); });
    const StructuredCost s = complete_oracles(smin_only);
    EXPECT_TRUE(s.supports(Oracle::kMarg));
    EXPECT_TRUE(s.supports(Oracle::kAMin));
    EXPECT_FALSE(s.supports(Oracle::kMin));
    const double eps = 0.1;
    const double am = s.amin(p, eps);
    EXPECT_LE(std::abs(am - min_dense(t, p)), eps);
    std::vector<Vec> log_d(k, Vec(n, 0.0));
    const Vec native = log_marg_dense(t, log_d, 3.0, 1);
    const Vec derived = s.log_marg(log_d, 3.0, 1);
    for (int j = 0; j < n; ++j) EXPECT_NEAR(derived[j], native[j], 1e-9);
    EXPECT_NEAR(smin_from_marg(s, p, 3.0), smin_dense(t, p, 3.0), 1e-9);
  }
}

TEST(StructuredCost, MissingOracleNamesIt) {
  StructuredCost c(2, 2, 1.0, "bare");
  try {
    c.smin(DualWeights::zeros(2, 2), 1.0);
    FAIL() << "expected CapabilityError";
  } catch (const CapabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("SMIN"), std::string::npos);
  }
  EXPECT_THROW(c.eval({0, 0}), CapabilityError);
}

TEST(StructuredCost, CountsOracleCalls) {
  const DenseTensor t(2, 2, Vec{0.0, 1.0, 1.0, 0.0});
  const StructuredCost c = make_dense_cost(t);
  c.reset_oracle_calls();
  c.min(DualWeights::zeros(2, 2));
  c.smin(DualWeights::zeros(2, 2), 1.0);
  EXPECT_EQ(c.oracle_calls(), 2);
}

TEST(StructuredCost, RejectsWeightsOfWrongShape) {
  const StructuredCost c = make_dense_cost(DenseTensor(2, 2, Vec{0.0, 1.0, 1.0, 0.0}));
  EXPECT_THROW(c.min(DualWeights::zeros(3, 2)), InvalidArgument);
}

}  // namespace
}  // namespace motkit
