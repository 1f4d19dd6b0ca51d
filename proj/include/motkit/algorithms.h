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

#ifndef MOTKIT_ALGORITHMS_H_
#define MOTKIT_ALGORITHMS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "motkit/core.h"
#include "motkit/oracles.h"

namespace motkit {

// Implicit plan P = (outer d_i) .* exp(-eta C) + (outer v_i). The scaling
// vectors are stored in the log domain so that large eta stays usable.
struct ScaledPlan {
  int n = 0;
  int k = 0;
  double eta = 0.0;
  std::vector<Vec> log_d;
  std::vector<Vec> v;
  std::shared_ptr<const StructuredCost> cost;

  // d_i = exp(log d_i).
  std::vector<Vec> d() const;
  // log of the scaled-component entry prod_i d_i[j_i] exp(-eta C_j).
  double log_scaled_entry(const Tuple& t) const;
  // Product-component entry prod_i v_i[j_i].
  double product_entry(const Tuple& t) const;
  double entry(const Tuple& t) const;
  // Marginals of both components, from k MARG calls.
  std::vector<Vec> marginals() const;
  // Total mass of the scaled component and of the product component.
  double scaled_mass() const;
  double product_mass() const;
};

enum class SolveStatus { kOptimal, kApprox, kInfeasibleCertificate };

std::string status_name(SolveStatus s);

struct SolveReport {
  double value = 0.0;
  std::optional<SparsePlan> plan;
  std::optional<ScaledPlan> scaled;
  long iterations = 0;
  long oracle_calls = 0;
  double wall_time = 0.0;
  SolveStatus status = SolveStatus::kApprox;
  // Standard error of `value` when it is a sampled estimate, 0 when exact.
  double value_stderr = 0.0;
  // Largest entrywise marginal deviation of the returned plan.
  double max_violation = 0.0;
  // Certified lower bound on the optimal value, -inf when none is available.
  double lower_bound = -kInf;
};

// Cost of tuple t, by direct evaluation when available and otherwise by one
// MIN (or AMIN at accuracy eps) call on one-hot weights.
double cost_at(const StructuredCost& sc, const Tuple& t, double eps = 1e-9);

// ---------------------------------------------------------------- SINKHORN

struct SinkhornOptions {
  // Cap on full round-robin sweeps.
  long max_sweeps = 20000;
  // Value is computed exactly by enumeration when n^k is at most this cap,
  // and estimated from `value_samples` samples otherwise.
  std::uint64_t exact_value_cap = 100000;
  long value_samples = 10000;
  std::uint64_t seed = 1;
};

// Entropic scaling at eta = 2 k log n / eps followed by rounding onto the
// transportation polytope. Requires MARG (native or derived from SMIN).
SolveReport sinkhorn_solve(const StructuredCost& sc, const Marginals& m,
                           double eps, const SinkhornOptions& options = {});

// I.i.d. samples from P / m(P). The scaled component is sampled one
// coordinate at a time from conditional marginals obtained by masking d.
std::vector<Tuple> sample_scaled_plan(const ScaledPlan& sp, std::uint64_t seed,
                                      long count);

// Exact <C, P> by enumeration, using `true_cost` for C. Throws CapExceeded
// above `cap`.
double scaled_plan_cost(const ScaledPlan& sp,
                        const std::function<double(const Tuple&)>& true_cost,
                        std::uint64_t cap);

// Monte Carlo estimate of <C, P> / m(P) with its standard error.
struct SampledCost {
  double mean = 0.0;
  double stderr_ = 0.0;
};
SampledCost sampled_plan_cost(const ScaledPlan& sp,
                              const std::function<double(const Tuple&)>& true_cost,
                              std::uint64_t seed, long count);

// --------------------------------------------------------------------- MWU

// Step-1 state for a cost with entries in [1, 2].
struct MwuState {
  explicit MwuState(const Marginals& mu, double lambda, double eps);

  Marginals mu;
  SparsePlan plan;
  // m_i(P), kept in sync with `plan`.
  std::vector<Vec> marg_cache;
  // Running estimate of <C, P> and a bound on its error.
  double cost_estimate = 0.0;
  double cost_error = 0.0;
  double lambda;
  double eps;
  double eta_mwu;
  // ARGAMIN accuracy and the iteration cap it is derived from.
  double eps_prime = 0.0;
  long iteration_cap = 0;
  long iterations = 0;

  // Number of softmax terms: 1 plus the atoms with positive mass.
  int terms() const;
  // Adds `mass` at t with cost c.
  void add(const Tuple& t, double mass, double c, double c_error = 0.0);
};

// smax(<C,P>/lambda, m_i(P)/mu_i) using the running cost estimate. Atoms with
// mu_i[j] = 0 never receive mass and are left out.
double mwu_potential(const MwuState& st);

// d/dh Phi(P + h delta_j) at h = 0 with the running cost estimate, computed
// with a shared max shift. `c` is C_j.
double mwu_potential_derivative(const MwuState& st, double c, const Tuple& j);
double mwu_potential_derivative(const MwuState& st, const StructuredCost& sc,
                                const Tuple& j);

struct MwuOptions {
  // Recently returned tuples kept for the bottleneck cache.
  std::size_t cache_size = 64;
  // Stop Step 1 as soon as the iterate rescales to a plan with mass at least
  // 1 - 4 eps that meets every packing constraint.
  bool early_exit = true;
  // Evaluate the potential invariant after every iteration.
  bool audit = false;
  // Feasibility accuracy is eps_scale * eps / (2 cmax) in mwu_solve. The
  // default keeps the worst-case bound within eps together with a bisection
  // resolution of eps / (4 cmax).
  double eps_scale = 1.0 / 16.0;
  // Hard cap on Step-1 iterations; 0 uses the theoretical bound.
  long max_iterations = 0;
};

struct MwuResult {
  bool feasible = false;
  std::optional<SparsePlan> plan;
  // Cost of the plan (exact when the cost has an eval matching its oracles).
  double cost = 0.0;
  long iterations = 0;
  // max over audited iterations of Phi(P) - (1+eps)^2 m(P) - log(terms).
  double max_potential_excess = -kInf;
  double potential_at_start = 0.0;
};

// Greedy completion: repeatedly adds the argmax-deficiency tuple with the
// largest mass that keeps m_i(P) <= mu_i. Returns a feasible plan.
SparsePlan mwu_round(const SparsePlan& partial, const Marginals& m);

// Decides K(lambda) for a cost with entries in [1, 2] via ARGAMIN.
MwuResult mwu_feasibility(const StructuredCost& sc, const Marginals& m,
                          double lambda, double eps,
                          const MwuOptions& options = {});

// Affine image a C + b of a cost (a > 0), with every oracle of `sc` carried
// over.
StructuredCost affine_cost(const StructuredCost& sc, double a, double b);

// Rescales to [1, 2], bisects lambda and maps the value back.
SolveReport mwu_solve(const StructuredCost& sc, const Marginals& m, double eps,
                      const MwuOptions& options = {});

// ------------------------------------------------------------------ COLGEN

struct ColgenOptions {
  long max_iters = 10000;
  double tol = 1e-9;
  // Called with the restricted-master value after every master solve.
  std::function<void(long iteration, double master_value)> on_master;
};

SolveReport colgen_solve(const StructuredCost& sc, const Marginals& m,
                         const ColgenOptions& options = {});

}  // namespace motkit

#endif  // MOTKIT_ALGORITHMS_H_
