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

#include "motkit/apps.h"

namespace motkit {

void validate_risk(const RiskProblem& pr) {
  if (pr.r < 1 || pr.k < 1) throw InvalidArgument("risk: r and k must be >= 1");
  if (static_cast<int>(pr.returns.size()) != pr.r ||
      static_cast<int>(pr.probs.size()) != pr.r) {
    throw InvalidArgument("risk: need returns and probabilities for every stock");
  }
  for (int l = 0; l < pr.r; ++l) {
    if (static_cast<int>(pr.returns[l].size()) != pr.k ||
        static_cast<int>(pr.probs[l].size()) != pr.k) {
      throw InvalidArgument("risk: need a distribution for every year of stock " +
                            std::to_string(l));
    }
    for (int i = 0; i < pr.k; ++i) {
      const Vec& a = pr.returns[l][i];
      const Vec& p = pr.probs[l][i];
      if (a.empty() || a.size() != p.size()) {
        throw InvalidArgument("risk: atoms and probabilities differ in length at (" +
                              std::to_string(l) + ", " + std::to_string(i) + ")");
      }
      double total = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (!(a[j] > 0) || !std::isfinite(a[j])) {
          throw InvalidArgument("risk: atom values must be positive and finite");
        }
        if (!(p[j] >= 0) || !std::isfinite(p[j])) {
          throw InvalidArgument("risk: probabilities must be nonnegative");
        }
        total += p[j];
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw InvalidArgument("risk: probabilities at (" + std::to_string(l) + ", " +
                              std::to_string(i) + ") sum to " + std::to_string(total));
      }
    }
  }
}

int risk_atoms(const RiskProblem& pr) {
  std::size_t n = 1;
  for (const auto& stock : pr.returns) {
    for (const Vec& a : stock) n = std::max(n, a.size());
  }
  return static_cast<int>(n);
}

Marginals risk_marginals(const RiskProblem& pr) {
  validate_risk(pr);
  const int n = risk_atoms(pr);
  std::vector<Vec> mu;
  for (int l = 0; l < pr.r; ++l) {
    for (int i = 0; i < pr.k; ++i) {
      Vec row(n, 0.0);
      std::copy(pr.probs[l][i].begin(), pr.probs[l][i].end(), row.begin());
      mu.push_back(std::move(row));
    }
  }
  return Marginals(std::move(mu));
}

std::shared_ptr<const LowRankPlusSparseCost> build_risk_cost(const RiskProblem& pr) {
  validate_risk(pr);
  const int n = risk_atoms(pr);
  const int kk = pr.r * pr.k;
  std::vector<std::vector<Vec>> u(pr.r, std::vector<Vec>(kk, Vec(n, 1.0)));
  for (int term = 0; term < pr.r; ++term) {
    for (int i = 0; i < pr.k; ++i) {
      const Vec& a = pr.returns[term][i];
      // Padding atoms carry probability 0 and a neutral value of 1.
      std::copy(a.begin(), a.end(), u[term][term * pr.k + i].begin());
    }
  }
  LowRankFactors r = make_lowrank_factors(n, kk, std::move(u), risk_max_total(pr));
  return std::make_shared<const LowRankPlusSparseCost>(std::move(r), SparseComponent{});
}

double risk_min_total(const RiskProblem& pr) {
  validate_risk(pr);
  double total = 0.0;
  for (int l = 0; l < pr.r; ++l) {
    double prod = 1.0;
    for (int i = 0; i < pr.k; ++i) {
      const Vec& a = pr.returns[l][i];
      prod *= *std::min_element(a.begin(), a.end());
    }
    total += prod;
  }
  return total;
}

double risk_max_total(const RiskProblem& pr) {
  validate_risk(pr);
  double total = 0.0;
  for (int l = 0; l < pr.r; ++l) {
    double prod = 1.0;
    for (int i = 0; i < pr.k; ++i) {
      const Vec& a = pr.returns[l][i];
      prod *= *std::max_element(a.begin(), a.end());
    }
    total += prod;
  }
  return total;
}

RiskResult worst_case_profit(const RiskProblem& pr, Engine engine, double eps,
                             const EngineOptions& options) {
  if (!(eps > 0) || !std::isfinite(eps)) throw InvalidArgument("risk: eps must be positive");
  const auto cost = build_risk_cost(pr);
  const Marginals m = risk_marginals(pr);
  // The engines run on the quantized cost C~ with |C~ - C| <= eps / 4 at
  // accuracy eps / 2, so the true cost of the returned plan is within eps of
  // the optimum.
  const double eps_b = eps / 4.0;
  const StructuredCost sc = quantized_view(cost, eps_b);
  const auto true_cost = [cost](const Tuple& t) { return cost->evaluate(t); };
  RiskResult out;
  switch (engine) {
    case Engine::kColgen:
      throw CapabilityError(
          "lowrank: exact MIN is unavailable for low-rank costs; use sinkhorn or mwu");
    case Engine::kSinkhorn: {
      SinkhornOptions o;
      o.seed = options.seed;
      if (options.max_iters > 0) o.max_sweeps = options.max_iters;
      out.report = sinkhorn_solve(sc, m, eps / 2.0, o);
      const ScaledPlan& sp = *out.report.scaled;
      bool enumerable = true;
      try {
        checked_power(m.n(), m.k(), o.exact_value_cap);
      } catch (const CapExceeded&) {
        enumerable = false;
      }
      if (enumerable) {
        out.value = scaled_plan_cost(sp, true_cost, o.exact_value_cap);
        out.value_stderr = 0.0;
      } else {
        const SampledCost est = sampled_plan_cost(sp, true_cost, o.seed, o.value_samples);
        out.value = est.mean;
        out.value_stderr = est.stderr_;
      }
      break;
    }
    case Engine::kMwu: {
      MwuOptions o;
      if (options.max_iters > 0) o.max_iterations = options.max_iters;
      out.report = mwu_solve(sc, m, eps / 2.0, o);
      out.value = plan_cost(*out.report.plan, true_cost);
      break;
    }
  }
  out.report.value = out.value;
  out.report.value_stderr = out.value_stderr;
  return out;
}

}  // namespace motkit
