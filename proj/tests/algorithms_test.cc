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

#include "motkit/algorithms.h"
#include "motkit/simplex.h"
#include "test_support.h"

namespace motkit {
namespace {

using testing::Rng;

struct Instance {
  std::shared_ptr<const GraphicalCost> gc;
  StructuredCost sc;
  Marginals m;
  double opt;
};

Instance random_instance(Rng& rng, int n, int k) {
  auto gc = testing::random_graphical(rng, n, k);
  Marginals m = testing::random_marginals(rng, n, k);
  const DenseTensor dense =
      DenseTensor::from_function(n, k, [&gc](const Tuple& t) { return gc->evaluate(t); });
  const double opt = brute_force_mot(dense, m).first;
  return {gc, make_graphical_cost(gc), std::move(m), opt};
}

// A fixed chain model: (j0 - j1)^2 + (j1 - j2)^2 on three atoms. The optimum
// 0.9 was computed independently with scipy's HiGHS solver.
Instance chain_instance() {
  Vec table(9);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) table[a * 3 + b] = (a - b) * (a - b);
  }
  auto gc = std::make_shared<const GraphicalCost>(
      3, 3, std::vector<Factor>{Factor{{0, 1}, table}, Factor{{1, 2}, table}});
  Marginals m({{0.2, 0.3, 0.5}, {0.4, 0.4, 0.2}, {0.1, 0.6, 0.3}});
  return {gc, make_graphical_cost(gc), std::move(m), 0.9};
}

TEST(Colgen, ExactOnChainReference) {
  const Instance in = chain_instance();
  const SolveReport r = colgen_solve(in.sc, in.m);
  EXPECT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.value, in.opt, 1e-9);
  ASSERT_TRUE(r.plan);
  EXPECT_TRUE(check_feasible(*r.plan, in.m, 1e-9));
  EXPECT_LE(r.plan->nnz(), vertex_sparsity_bound(3, 3));
  EXPECT_LE(r.lower_bound, r.value);
}

TEST(Colgen, MatchesBruteForceAndStaysSparse) {
  Rng rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = testing::uniform_int(rng, 1, 4);
    const int k = testing::uniform_int(rng, 1, 4);
    const Instance in = random_instance(rng, n, k);
    std::vector<double> masters;
    ColgenOptions o;
    o.on_master = [&masters](long, double v) { masters.push_back(v); };
    const SolveReport r = colgen_solve(in.sc, in.m, o);
    EXPECT_NEAR(r.value, in.opt, 1e-6);
    ASSERT_TRUE(r.plan);
    EXPECT_TRUE(check_feasible(*r.plan, in.m, 1e-9));
    EXPECT_LE(r.plan->nnz(), vertex_sparsity_bound(n, k));
    EXPECT_NEAR(plan_cost(*r.plan, [&in](const Tuple& t) { return in.gc->evaluate(t); }),
                r.value, 1e-9);
    for (std::size_t i = 1; i < masters.size(); ++i) {
      EXPECT_LE(masters[i], masters[i - 1] + 1e-7 * (1.0 + std::abs(masters[i - 1])));
    }
  }
}

TEST(Colgen, NeedsArgmin) {
  StructuredCost smin_only(2, 2, 1.0, "smin-only");
  smin_only.set_smin([](const DualWeights&, double) { return 0.0; });
  EXPECT_THROW(colgen_solve(smin_only, Marginals::uniform(2, 2)), CapabilityError);
}

TEST(Sinkhorn, EpsGuaranteeAndFeasibility) {
  Rng rng(62);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = testing::uniform_int(rng, 2, 4);
    const int k = testing::uniform_int(rng, 2, 4);
    const Instance in = random_instance(rng, n, k);
    const SolveReport r = sinkhorn_solve(in.sc, in.m, 0.1);
    ASSERT_TRUE(r.scaled);
    const std::vector<Vec> marg = r.scaled->marginals();
    for (int i = 0; i < k; ++i) {
      double l1 = 0.0;
      for (int j = 0; j < n; ++j) l1 += std::abs(marg[i][j] - in.m[i][j]);
      EXPECT_LE(l1, 1e-7);
    }
    EXPECT_LE(r.value, in.opt + 0.1);
    EXPECT_GE(r.value, in.opt - 1e-9);
  }
}

TEST(Sinkhorn, SampledCostWithinThreeSigma) {
  Rng rng(63);
  const Instance in = random_instance(rng, 3, 4);
  const SolveReport r = sinkhorn_solve(in.sc, in.m, 0.1);
  ASSERT_TRUE(r.scaled);
  const auto c = [&in](const Tuple& t) { return in.gc->evaluate(t); };
  const double exact = scaled_plan_cost(*r.scaled, c, 1000000);
  const SampledCost s = sampled_plan_cost(*r.scaled, c, 5, 10000);
  EXPECT_LE(std::abs(s.mean - exact), 3.0 * s.stderr_ + 1e-12);
  EXPECT_NEAR(exact, r.value, 1e-9);
}

TEST(Sinkhorn, NeedsSminOrMarg) {
  const DenseTensor t(2, 2, Vec{0.0, 1.0, 1.0, 0.0});
  StructuredCost min_only(2, 2, 1.0, "min-only");
  min_only.set_min([t](const DualWeights& p) { return min_dense(t, p); });
  try {
    sinkhorn_solve(min_only, Marginals::uniform(2, 2), 0.1);
    FAIL() << "expected CapabilityError";
  } catch (const CapabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("MARG"), std::string::npos);
  }
}

TEST(Mwu, EpsGuaranteeSparsityAndFeasibility) {
  Rng rng(64);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = testing::uniform_int(rng, 2, 3);
    const int k = testing::uniform_int(rng, 2, 3);
    const Instance in = random_instance(rng, n, k);
    const double eps = 0.1;
    const SolveReport r = mwu_solve(in.sc, in.m, eps);
    ASSERT_TRUE(r.plan);
    EXPECT_TRUE(check_feasible(*r.plan, in.m, 1e-9));
    EXPECT_LE(r.value, in.opt + eps);
    EXPECT_LE(r.lower_bound, in.opt + 1e-9);
    EXPECT_LE(static_cast<double>(r.plan->nnz()), 10.0 * n * k / (eps * eps));
  }
}

TEST(Mwu, PotentialInvariantHoldsWhenAudited) {
  Rng rng(65);
  const Instance in = random_instance(rng, 3, 3);
  // Rescale to [1, 2] as the feasibility routine expects.
  const StructuredCost unit = affine_cost(in.sc, 1.0 / in.gc->cmax(), 1.0);
  MwuOptions o;
  o.audit = true;
  o.early_exit = false;
  const double lambda = 1.0 + in.opt / in.gc->cmax() + 0.2;
  const MwuResult res = mwu_feasibility(unit, in.m, lambda, 0.1, o);
  EXPECT_TRUE(res.feasible);
  EXPECT_GT(res.iterations, 0);
  EXPECT_LE(res.max_potential_excess, 1e-9);
}

TEST(Mwu, InfeasibleBelowOptimum) {
  Rng rng(66);
  const Instance in = random_instance(rng, 2, 3);
  const StructuredCost unit = affine_cost(in.sc, 1.0 / in.gc->cmax(), 1.0);
  const double lambda = 1.0 + in.opt / in.gc->cmax();
  const MwuResult res = mwu_feasibility(unit, in.m, lambda * 0.7, 0.05);
  EXPECT_FALSE(res.feasible);
}

TEST(Mwu, RoundingCompletesPartialPlan) {
  const Marginals m({{0.3, 0.7}, {0.6, 0.4}});
  SparsePlan partial(2, 2);
  partial.add({0, 0}, 0.2);
  partial.add({1, 1}, 0.1);
  const SparsePlan full = mwu_round(partial, m);
  EXPECT_TRUE(check_feasible(full, m, 1e-12));
  SparsePlan over(2, 2);
  over.add({0, 0}, 0.5);
  EXPECT_THROW(mwu_round(over, m), InvalidArgument);
}

TEST(AffineCost, MapsOracles) {
  const DenseTensor t(2, 2, Vec{0.0, 1.0, 2.0, 3.0});
  const StructuredCost base = make_dense_cost(t);
  const StructuredCost a = affine_cost(base, 0.5, 1.0);
  const DualWeights p = DualWeights::zeros(2, 2);
  EXPECT_NEAR(a.min(p), 1.0, 1e-15);
  EXPECT_NEAR(a.eval({1, 1}), 2.5, 1e-15);
  EXPECT_NEAR(a.smin(p, 2.0), 0.5 * base.smin(p, 1.0) + 1.0, 1e-12);
}

TEST(SolveStatus, Names) {
  EXPECT_EQ(status_name(SolveStatus::kOptimal), "optimal");
  EXPECT_EQ(status_name(SolveStatus::kApprox), "approx");
}

}  // namespace
}  // namespace motkit
