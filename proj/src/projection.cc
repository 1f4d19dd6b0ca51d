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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "motkit/apps.h"

namespace motkit {

namespace {

double sparse_lookup(const std::map<Tuple, double>& s, const Tuple& t) {
  auto it = s.find(t);
  return it == s.end() ? 0.0 : it->second;
}

std::map<Tuple, double> sparse_map(const SparseComponent& s) {
  std::map<Tuple, double> out;
  for (const SparseEntry& e : s.entries) out[e.index] += e.value;
  return out;
}

std::map<Tuple, double> plan_map(const SparsePlan& p) {
  std::map<Tuple, double> out;
  for (const PlanEntry& e : p.entries()) out[e.index] += e.mass;
  return out;
}

// Linear subproblem min_D <D, P - Q> over the polytope, where P - Q is
// written as the sparse part P - S plus the low-rank part -R.
struct LinearStep {
  SparsePlan d;
  // <D, P - Q> with the true Q.
  double value = 0.0;
  // Certified lower bound on the subproblem minimum.
  double lower_bound = 0.0;
  long iterations = 0;
};

LinearStep linear_step(const LowRankFactors& neg_r, const LowRankFactors& r,
                       const std::map<Tuple, double>& s, const SparsePlan& p,
                       const Marginals& m, double eps_lp, const MwuOptions& mwu) {
  std::map<Tuple, double> diff = plan_map(p);
  for (const auto& [t, v] : s) diff[t] -= v;
  SparseComponent sc_sparse;
  for (const auto& [t, v] : diff) sc_sparse.entries.push_back({t, v});
  LowRankOptions lo;
  lo.backend = LowRankBackend::kQuantized;
  auto cost = std::make_shared<const LowRankPlusSparseCost>(neg_r, std::move(sc_sparse), lo);
  // Quantization error eps_lp / 4 enters twice; MWU takes the remaining half.
  const double eps_b = eps_lp / 4.0;
  const StructuredCost sc = quantized_view(cost, eps_b);
  SolveReport rep = mwu_solve(sc, m, eps_lp / 2.0, mwu);
  LinearStep out{std::move(*rep.plan), 0.0, rep.lower_bound - eps_b, rep.iterations};
  const std::map<Tuple, double> pm = plan_map(p);
  for (const PlanEntry& e : out.d.entries()) {
    const double q = r.evaluate(e.index) + sparse_lookup(s, e.index);
    out.value += e.mass * (sparse_lookup(pm, e.index) - q);
  }
  return out;
}

// <P, P - Q> with the true Q.
double self_inner(const SparsePlan& p, const LowRankFactors& r,
                  const std::map<Tuple, double>& s) {
  double total = 0.0;
  for (const PlanEntry& e : p.entries()) {
    total += e.mass * (e.mass - (r.evaluate(e.index) + sparse_lookup(s, e.index)));
  }
  return total;
}

}  // namespace

double squared_norm(const LowRankFactors& r, const SparseComponent& s) {
  double rr = 0.0;
  for (int a = 0; a < r.rank(); ++a) {
    for (int b = 0; b < r.rank(); ++b) {
      double prod = 1.0;
      for (int i = 0; i < r.k; ++i) {
        double dot = 0.0;
        for (int j = 0; j < r.n; ++j) dot += r.u[a][i][j] * r.u[b][i][j];
        prod *= dot;
      }
      rr += prod;
    }
  }
  double rs = 0.0;
  double ss = 0.0;
  for (const auto& [t, v] : sparse_map(s)) {
    rs += r.evaluate(t) * v;
    ss += v * v;
  }
  return rr + 2.0 * rs + ss;
}

double projection_objective(const SparsePlan& p, const LowRankFactors& r,
                            const SparseComponent& s) {
  const std::map<Tuple, double> sm = sparse_map(s);
  double pp = 0.0;
  double pq = 0.0;
  for (const auto& [t, mass] : plan_map(p)) {
    pp += mass * mass;
    pq += mass * (r.evaluate(t) + sparse_lookup(sm, t));
  }
  return std::max(0.0, pp - 2.0 * pq + squared_norm(r, s));
}

void validate_projection(const ProjectionProblem& pr, const ProjectionOptions& options) {
  if (!(pr.eps > 0) || !std::isfinite(pr.eps)) {
    throw InvalidArgument("projection: eps must be positive");
  }
  const LowRankFactors r = make_lowrank_factors(pr.r.n, pr.r.k, pr.r.u, pr.r.rmax);
  validate_sparse(pr.s, r.n, r.k);
  if (pr.marginals.n() != r.n || pr.marginals.k() != r.k) {
    throw InvalidArgument("projection: marginals do not match the dimensions of Q");
  }
  const std::map<Tuple, double> sm = sparse_map(pr.s);
  const auto check = [&](const Tuple& t) {
    const double q = r.evaluate(t) + sparse_lookup(sm, t);
    if (q < -1e-12 * (1.0 + std::abs(q))) {
      throw InvalidArgument("projection: Q has a negative entry");
    }
  };
  for (const auto& [t, v] : sm) check(t);
  bool enumerable = true;
  try {
    checked_power(r.n, r.k, brute_force_cap());
  } catch (const CapExceeded&) {
    enumerable = false;
  }
  if (enumerable) {
    Tuple t(r.k, 0);
    do check(t);
    while (next_tuple(t, r.n));
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> pick(0, r.n - 1);
    Tuple t(r.k);
    for (std::size_t s = 0; s < options.audit_samples; ++s) {
      for (int& x : t) x = pick(rng);
      check(t);
    }
  }
}

ProjectionResult fw_project(const ProjectionProblem& pr, const ProjectionOptions& options) {
  validate_projection(pr, options);
  const LowRankFactors r = make_lowrank_factors(pr.r.n, pr.r.k, pr.r.u, pr.r.rmax);
  LowRankFactors neg = r;
  for (auto& term : neg.u) {
    for (double& x : term[0]) x = -x;
  }
  const std::map<Tuple, double> s = sparse_map(pr.s);
  const Marginals& m = pr.marginals;
  const double eps_lp = pr.eps / 4.0;
  const long steps = options.iterations > 0
                         ? options.iterations
                         : static_cast<long>(std::ceil(8.0 / pr.eps));

  ProjectionResult out{mwu_round(SparsePlan(m.n(), m.k()), m)};
  for (long t = 0; t < steps; ++t) {
    const LinearStep ls = linear_step(neg, r, s, out.plan, m, eps_lp, options.mwu);
    out.lp_iterations += ls.iterations;
    const double gamma = 2.0 / (static_cast<double>(t) + 2.0);
    SparsePlan next = out.plan;
    next.scale(1.0 - gamma);
    for (const PlanEntry& e : ls.d.entries()) next.add(e.index, gamma * e.mass);
    next.prune(0.0);
    out.plan = std::move(next);
    ++out.iterations;
  }
  // Gradient of ||P - Q||^2 is 2 (P - Q).
  const LinearStep last =
      linear_step(neg, r, s, out.plan, m, eps_lp, options.certificate_mwu);
  out.lp_iterations += last.iterations;
  const double inner = self_inner(out.plan, r, s);
  out.gap = 2.0 * (inner - last.value);
  out.gap_bound = 2.0 * (inner - last.lower_bound);
  out.objective = projection_objective(out.plan, r, pr.s);
  return out;
}

}  // namespace motkit
