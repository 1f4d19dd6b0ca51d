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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <unordered_set>

#include "motkit/algorithms.h"
#include "motkit/simplex.h"

namespace motkit {

namespace {

SparseColumn tuple_column(const Tuple& t, int n) {
  SparseColumn col;
  for (std::size_t i = 0; i < t.size(); ++i) {
    col.rows.push_back(static_cast<int>(i) * n + t[i]);
    col.values.push_back(1.0);
  }
  return col;
}

}  // namespace

SolveReport colgen_solve(const StructuredCost& sc_in, const Marginals& m,
                         const ColgenOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const StructuredCost sc = complete_oracles(sc_in);
  if (!sc.supports(Oracle::kArgMin)) {
    throw CapabilityError(sc.name() + ": COLGEN needs the ARGMIN oracle (or MIN to derive it)");
  }
  if (m.n() != sc.n() || m.k() != sc.k()) {
    throw InvalidArgument("colgen: marginals do not match the cost dimensions");
  }
  if (options.max_iters < 1) throw InvalidArgument("colgen: max_iters must be >= 1");
  const long calls0 = sc.oracle_calls();
  const int n = m.n();
  const int k = m.k();

  // Restricted master: one equality row per (marginal, atom).
  Vec b;
  b.reserve(static_cast<std::size_t>(n) * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < n; ++j) b.push_back(m[i][j]);
  }
  RevisedSimplex master(b);
  std::vector<Tuple> columns;
  std::unordered_set<Tuple, TupleHash> pool;
  const auto add_column = [&](const Tuple& t, double c) {
    master.add_column(tuple_column(t, n), c);
    columns.push_back(t);
    pool.insert(t);
  };
  const SparsePlan start = mwu_round(SparsePlan(n, k), m);
  for (const PlanEntry& e : start.entries()) add_column(e.index, cost_at(sc, e.index));

  SolveReport report;
  report.status = SolveStatus::kApprox;
  LpSolution sol;
  double previous = kInf;
  long iter = 0;
  while (true) {
    sol = master.solve();
    ++iter;
    if (sol.status != LpStatus::kOptimal) {
      throw OracleViolation("colgen: restricted master is not optimal (internal error)");
    }
    if (options.on_master) options.on_master(iter, sol.value);
    // The master snaps basic values below 1e-9 to zero, which moves its value
    // by a few multiples of that between solves.
    const double slack = 1e-7 * (1.0 + std::abs(previous));
    if (std::isfinite(previous) && sol.value > previous + slack) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "colgen: restricted master value increased from %.17g to %.17g",
                    previous, sol.value);
      throw OracleViolation(buf);
    }
    previous = sol.value;
    std::vector<Vec> p(k, Vec(n));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < n; ++j) p[i][j] = sol.duals[static_cast<std::size_t>(i) * n + j];
    }
    const OracleAnswerArg ans = sc.argmin(DualWeights(p, kInf));
    if (ans.value >= -options.tol) {
      report.status = SolveStatus::kOptimal;
      break;
    }
    if (pool.count(ans.tuple) != 0) {
      // A column already in the master cannot have negative reduced cost at
      // an optimal basis, so this is round-off in the duals.
      break;
    }
    if (iter >= options.max_iters) break;
    double wsum = 0.0;
    for (int i = 0; i < k; ++i) wsum += p[i][ans.tuple[i]];
    const double c = sc.has_eval() ? sc.eval(ans.tuple) : ans.value + wsum;
    add_column(ans.tuple, c);
  }

  SparsePlan plan(n, k);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (sol.x[c] > 0) plan.add(columns[c], sol.x[c]);
  }
  report.value = sol.value;
  if (report.status == SolveStatus::kOptimal) report.lower_bound = sol.value - options.tol;
  report.iterations = iter;
  report.max_violation = max_marginal_violation(plan.marginals(), m);
  report.plan = std::move(plan);
  report.oracle_calls = sc.oracle_calls() - calls0;
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace motkit
