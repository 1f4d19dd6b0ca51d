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

#include "motkit/lowrank.h"
#include "test_support.h"

namespace motkit {
namespace {

using testing::Rng;

TEST(PolyApprox, ErrorWithinCertificate) {
  Rng rng(51);
  for (double eta : {0.5, 2.0, 4.0}) {
    for (double rmax : {0.25, 0.5, 1.0}) {
      const double eps_tilde = 1e-3 * std::exp(-eta * rmax);
      const PolyCoeffs q = poly_approx_exp(eta, rmax, eps_tilde);
      EXPECT_LE(q.certified_error, eps_tilde / 2.0);
      for (int s = 0; s < 2000; ++s) {
        const double x = testing::uniform(rng, -rmax, rmax);
        EXPECT_LE(std::abs(q(x) - std::exp(-eta * x)), eps_tilde) << eta << " " << rmax;
      }
    }
  }
}

TEST(PolyApprox, RejectsUnreachableAccuracy) {
  EXPECT_THROW(poly_approx_exp(1.0, 1.0, std::exp(-1.0)), InvalidArgument);
  EXPECT_THROW(poly_approx_exp(8.0, 2.0, 1e-3 * std::exp(-16.0)), PrecisionError);
}

TEST(Lift, EntriesMatchPolynomialOfR) {
  Rng rng(52);
  const auto c = testing::random_lowrank(rng, 3, 3, 2, 0);
  const LowRankFactors& r = c->factors();
  const PolyCoeffs q = poly_approx_exp(2.0, r.rmax, 1e-4 * std::exp(-2.0 * r.rmax));
  const LowRankFactors l = lift_lowrank_exp(r, q);
  Tuple t(3, 0);
  do {
    EXPECT_NEAR(l.evaluate(t), q(r.evaluate(t)), 1e-10);
  } while (next_tuple(t, 3));
  EXPECT_THROW(lift_lowrank_exp(r, q, 2), CapExceeded);
}

TEST(Lift, MarginalizeScaled) {
  Rng rng(53);
  const auto c = testing::random_lowrank(rng, 3, 3, 2, 0);
  const LowRankFactors& r = c->factors();
  std::vector<Vec> d(3, Vec(3));
  for (Vec& row : d) {
    for (double& x : row) x = testing::uniform(rng);
  }
  double expected = 0.0;
  Tuple t(3, 0);
  do {
    expected += d[0][t[0]] * d[1][t[1]] * d[2][t[2]] * r.evaluate(t);
  } while (next_tuple(t, 3));
  EXPECT_NEAR(marginalize_scaled_lowrank(d, r), expected, 1e-12);
}

// Sampled certification of the lift and of the implied cost perturbation.
TEST(Lift, AuditWithinBudget) {
  Rng rng(54);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = testing::random_lowrank(rng, 3, 3, 1 + trial % 2, 2);
    const double eps = 0.5;
    const double eta = 4.0;
    ASSERT_TRUE(c->uses_lift(eta, eps));
    const LiftAudit a = c->audit_lift(eta, eps, 10000, 7 + trial);
    EXPECT_LE(a.lift_error, a.eps_tilde);
    EXPECT_LE(a.cost_error, a.cost_budget);
    EXPECT_DOUBLE_EQ(a.cost_budget, eps / 2.0);
  }
}

TEST(LowRankOracles, SminMatchesDenseCtilde) {
  Rng rng(55);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = testing::uniform_int(rng, 2, 4);
    const int k = testing::uniform_int(rng, 2, 3);
    const auto c = testing::random_lowrank(rng, n, k, testing::uniform_int(rng, 1, 2), 2);
    const DualWeights p = testing::random_weights(rng, n, k, 1.0);
    const double eps = 0.5;
    const double eta = testing::uniform(rng, 1.0, 6.0);
    const auto ct = [&](const Tuple& t) { return c->ctilde(t, eta, eps); };
    const double expected = testing::brute_smin(ct, n, k, p, eta);
    EXPECT_NEAR(lr_smin(*c, p, eta, eps), expected, 1e-8 * (1.0 + std::abs(expected)));
    Tuple t(k, 0);
    do {
      EXPECT_LE(std::abs(ct(t) - c->evaluate(t)), eps / 2.0 + 1e-12);
    } while (next_tuple(t, n));
  }
}

TEST(LowRankOracles, AminWithinEps) {
  Rng rng(56);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = testing::uniform_int(rng, 2, 4);
    const int k = testing::uniform_int(rng, 2, 4);
    const auto c = testing::random_lowrank(rng, n, k, 2, 3);
    const DualWeights p = testing::random_weights(rng, n, k, 1.0);
    const auto exact = [&c](const Tuple& t) { return c->evaluate(t); };
    const double mn = testing::brute_min(exact, n, k, p);
    EXPECT_LE(std::abs(lr_amin(*c, p, 0.1) - mn), 0.1);
  }
}

TEST(QuantizedProduct, ApproximatesAndMinimizes) {
  Rng rng(57);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = testing::uniform_int(rng, 2, 4);
    const int k = testing::uniform_int(rng, 2, 4);
    const auto c = testing::random_lowrank(rng, n, k, testing::uniform_int(rng, 1, 3), 0);
    const double eps_b = 0.02;
    const QuantizedProduct qp(c->factors(), eps_b);
    const auto rt = [&qp](const Tuple& t) { return qp.eval(t); };
    Tuple t(k, 0);
    do {
      EXPECT_LE(std::abs(qp.eval(t) - c->factors().evaluate(t)), eps_b + 1e-12);
    } while (next_tuple(t, n));
    const DualWeights p = testing::random_weights(rng, n, k, 1.0);
    std::vector<Vec> w(k, Vec(n));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < n; ++j) w[i][j] = -p[i][j];
    }
    const OracleAnswerArg a = qp.argmin(w);
    const double mn = testing::brute_min(rt, n, k, p);
    EXPECT_NEAR(a.value, mn, 1e-10);
    EXPECT_NEAR(rt(a.tuple) - p.sum_at(a.tuple), mn, 1e-10);
    std::vector<Vec> log_d(k, Vec(n, 0.0));
    const double eta = 3.0;
    const double expected = -eta * testing::brute_smin(rt, n, k, DualWeights::zeros(n, k), eta);
    EXPECT_NEAR(qp.log_partition(log_d, eta), expected, 1e-9 * (1.0 + std::abs(expected)));
  }
}

TEST(QuantizedProduct, RejectsMixedSignFactors) {
  const LowRankFactors r = make_lowrank_factors(2, 2, {{{1.0, -1.0}, {1.0, 1.0}}});
  EXPECT_THROW(QuantizedProduct(r, 0.01), CapabilityError);
}

TEST(QuantizedView, ExactMinOfQuantizedCost) {
  Rng rng(58);
  const auto c = testing::random_lowrank(rng, 3, 3, 2, 3);
  const StructuredCost sc = quantized_view(c, 0.01);
  const DualWeights p = testing::random_weights(rng, 3, 3, 1.0);
  const auto ev = [&sc](const Tuple& t) { return sc.eval(t); };
  EXPECT_NEAR(sc.min(p), testing::brute_min(ev, 3, 3, p), 1e-10);
  const auto exact = [&c](const Tuple& t) { return c->evaluate(t); };
  Tuple t(3, 0);
  do {
    EXPECT_LE(std::abs(ev(t) - exact(t)), 0.01 + 1e-12);
  } while (next_tuple(t, 3));
}

TEST(SparseComponent, RejectsDuplicates) {
  SparseComponent s;
  s.entries = {{{0, 1}, 1.0}, {{0, 1}, 2.0}};
  EXPECT_THROW(validate_sparse(s, 2, 2), InvalidArgument);
  s.entries = {{{0, 2}, 1.0}};
  EXPECT_THROW(validate_sparse(s, 2, 2), InvalidArgument);
  s.entries = {{{0, 1}, 1.0}, {{1, 1}, 1.0}};
  EXPECT_THROW(validate_sparse(s, 2, 2, 1), CapExceeded);
}

TEST(LowRankCost, EvaluatesRPlusS) {
  const LowRankFactors r = make_lowrank_factors(2, 2, {{{1.0, 2.0}, {3.0, 4.0}}});
  SparseComponent s;
  s.entries = {{{1, 0}, 0.5}};
  const LowRankPlusSparseCost c(r, s);
  EXPECT_DOUBLE_EQ(c.evaluate({0, 0}), 3.0);
  EXPECT_DOUBLE_EQ(c.evaluate({1, 0}), 6.5);
  EXPECT_DOUBLE_EQ(c.evaluate({1, 1}), 8.0);
  EXPECT_DOUBLE_EQ(c.factors().rmax, 8.0);
}

}  // namespace
}  // namespace motkit
