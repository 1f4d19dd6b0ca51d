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
#include <chrono>
#include <cmath>
#include <deque>
#include <sstream>
#include <string>

#include "motkit/algorithms.h"

namespace motkit {

namespace {

using Clock = std::chrono::steady_clock;

// Finite weights beyond this magnitude are replaced by -inf before the
// oracle call. A tuple using such a weight costs more than the tuple built
// from the row minima of the shifted weights, so it can never be selected.
constexpr double kWeightClip = 1e11;

// Deficiencies below this are treated as saturated in the rounding step.
constexpr double kRoundTol = 1e-13;

struct CachedTuple {
  Tuple t;
  double c;
  double c_error;
};

// Oracle weights for the bottleneck: p_i[j] = -lambda e^{m_i[j]/mu_i[j]} /
// (e^{c~/lambda} mu_i[j]), shifted per row by its maximum. Also returns the
// row shifts (the maxima) so that C_j - sum_i p_i[j_i] can be recovered.
std::vector<Vec> bottleneck_weights(const MwuState& st, Vec& shifts) {
  const int n = st.mu.n();
  const int k = st.mu.k();
  const double lc = st.cost_estimate / st.lambda - std::log(st.lambda);
  std::vector<Vec> p(k, Vec(n, -kInf));
  shifts.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    Vec l(n, kInf);
    double lmin = kInf;
    for (int j = 0; j < n; ++j) {
      const double mu = st.mu[i][j];
      if (mu <= 0) continue;
      l[j] = st.marg_cache[i][j] / mu - std::log(mu);
      lmin = std::min(lmin, l[j]);
    }
    shifts[i] = -std::exp(lmin - lc);
    for (int j = 0; j < n; ++j) {
      if (l[j] == kInf) continue;
      const double gap = l[j] - lmin;
      if (gap == 0.0) {
        p[i][j] = 0.0;
        continue;
      }
      const double log_mag = lmin - lc + std::log(std::expm1(gap));
      p[i][j] = log_mag > std::log(kWeightClip) ? -kInf : -std::exp(log_mag);
    }
  }
  return p;
}

double weight_sum(const std::vector<Vec>& p, const Tuple& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += p[i][t[i]];
  return s;
}

double plan_true_cost(const SparsePlan& plan, const StructuredCost& sc) {
  double total = 0.0;
  for (const PlanEntry& e : plan.entries()) {
    if (e.mass > 0) total += e.mass * cost_at(sc, e.index);
  }
  return total;
}

}  // namespace

MwuState::MwuState(const Marginals& mu_in, double lambda_in, double eps_in)
    : mu(mu_in),
      plan(mu_in.n(), mu_in.k()),
      marg_cache(mu_in.k(), Vec(mu_in.n(), 0.0)),
      lambda(lambda_in),
      eps(eps_in) {
  if (!(lambda > 0) || !std::isfinite(lambda)) {
    throw InvalidArgument("mwu: lambda must be positive and finite");
  }
  if (!(eps > 0) || eps > 0.5) throw InvalidArgument("mwu: eps must lie in (0, 1/2]");
  const double nk1 = static_cast<double>(mu.n()) * mu.k() + 1.0;
  eta_mwu = 2.0 * std::log(nk1) / eps;
  const double terms_d = static_cast<double>(terms());
  const double growth = (1.0 + eps) * (1.0 + eps) * (eta_mwu + eps) + std::log(terms_d);
  iteration_cap = static_cast<long>(std::ceil(terms_d * growth / eps));
  eps_prime = lambda * eps / (12.0 * static_cast<double>(iteration_cap));
}

int MwuState::terms() const {
  int count = 1;
  for (int i = 0; i < mu.k(); ++i) {
    for (int j = 0; j < mu.n(); ++j) count += mu[i][j] > 0;
  }
  return count;
}

void MwuState::add(const Tuple& t, double mass, double c, double c_error) {
  plan.add(t, mass);
  for (int i = 0; i < mu.k(); ++i) marg_cache[i][t[i]] += mass;
  cost_estimate += mass * c;
  cost_error += mass * c_error;
}

double mwu_potential(const MwuState& st) {
  LogSumAccumulator acc;
  acc.add(st.cost_estimate / st.lambda);
  for (int i = 0; i < st.mu.k(); ++i) {
    for (int j = 0; j < st.mu.n(); ++j) {
      if (st.mu[i][j] > 0) acc.add(st.marg_cache[i][j] / st.mu[i][j]);
    }
  }
  return acc.value();
}

namespace {

// Shared pieces of the derivative: the max shift over the softmax terms, the
// shifted normalizer and each marginal term's contribution
// exp(m_i[t]/mu_i[t] - hi) / mu_i[t] (+inf where mu_i[t] = 0).
struct SoftmaxFrame {
  double zc;
  double hi;
  double den;
  std::vector<Vec> term;
};

SoftmaxFrame softmax_frame(const MwuState& st) {
  const int n = st.mu.n();
  const int k = st.mu.k();
  SoftmaxFrame f;
  f.zc = st.cost_estimate / st.lambda;
  f.hi = f.zc;
  for (int i = 0; i < k; ++i) {
    for (int t = 0; t < n; ++t) {
      if (st.mu[i][t] > 0) f.hi = std::max(f.hi, st.marg_cache[i][t] / st.mu[i][t]);
    }
  }
  f.den = std::exp(f.zc - f.hi);
  f.term.assign(k, Vec(n, kInf));
  for (int i = 0; i < k; ++i) {
    for (int t = 0; t < n; ++t) {
      const double mu = st.mu[i][t];
      if (mu <= 0) continue;
      const double e = std::exp(st.marg_cache[i][t] / mu - f.hi);
      f.den += e;
      f.term[i][t] = e / mu;
    }
  }
  return f;
}

double derivative_in_frame(const MwuState& st, const SoftmaxFrame& f, double c,
                           const Tuple& j) {
  double num = c * std::exp(f.zc - f.hi) / st.lambda;
  for (std::size_t i = 0; i < j.size(); ++i) num += f.term[i][j[i]];
  return num / f.den;
}

}  // namespace

double mwu_potential_derivative(const MwuState& st, double c, const Tuple& j) {
  const int n = st.mu.n();
  const int k = st.mu.k();
  if (static_cast<int>(j.size()) != k) throw InvalidArgument("mwu: tuple has wrong length");
  for (int i = 0; i < k; ++i) {
    if (j[i] < 0 || j[i] >= n) throw InvalidArgument("mwu: tuple entry out of range");
  }
  return derivative_in_frame(st, softmax_frame(st), c, j);
}

double mwu_potential_derivative(const MwuState& st, const StructuredCost& sc,
                                const Tuple& j) {
  return mwu_potential_derivative(st, cost_at(sc, j, st.eps_prime), j);
}

SparsePlan mwu_round(const SparsePlan& partial, const Marginals& m) {
  const int n = m.n();
  const int k = m.k();
  if (partial.n() != n || partial.k() != k) {
    throw InvalidArgument("mwu_round: plan and marginals differ in shape");
  }
  SparsePlan plan = partial;
  std::vector<Vec> marg = plan.marginals();
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < n; ++j) {
      if (marg[i][j] > m[i][j] + 1e-12) {
        throw InvalidArgument("mwu_round: partial plan exceeds marginal " +
                              std::to_string(i) + " at atom " + std::to_string(j));
      }
    }
  }
  const long max_passes = static_cast<long>(n) * k + 1;
  for (long pass = 0; pass < max_passes; ++pass) {
    Tuple t(k);
    double alpha = kInf;
    for (int i = 0; i < k; ++i) {
      int best = 0;
      double best_def = m[i][0] - marg[i][0];
      for (int j = 1; j < n; ++j) {
        const double def = m[i][j] - marg[i][j];
        if (def > best_def) {
          best_def = def;
          best = j;
        }
      }
      t[i] = best;
      alpha = std::min(alpha, best_def);
    }
    if (alpha <= kRoundTol) break;
    plan.add(t, alpha);
    for (int i = 0; i < k; ++i) marg[i][t[i]] += alpha;
  }
  return plan;
}

MwuResult mwu_feasibility(const StructuredCost& sc, const Marginals& m,
                          double lambda, double eps, const MwuOptions& options) {
  if (!sc.supports(Oracle::kArgAMin)) {
    throw CapabilityError(sc.name() + ": MWU needs the ARGAMIN oracle (or AMIN to derive it)");
  }
  if (m.n() != sc.n() || m.k() != sc.k()) {
    throw InvalidArgument("mwu: marginals do not match the cost dimensions");
  }
  MwuState st(m, lambda, eps);
  const int k = m.k();
  const bool exact_eval = sc.has_eval() && sc.eval_matches_oracles();
  const double threshold = exact_eval ? 1.0 + eps : 1.0 + eps / 3.0;
  const double log_terms = std::log(static_cast<double>(st.terms()));
  const long cap = options.max_iterations > 0 ? options.max_iterations : st.iteration_cap;
  std::deque<CachedTuple> cache;

  MwuResult result;
  result.potential_at_start = mwu_potential(st);
  bool early = false;
  double mass = 0.0;
  while (mass < st.eta_mwu) {
    if (st.iterations >= cap) {
      throw ConvergenceError("mwu: Step 1 exceeded " + std::to_string(cap) + " iterations");
    }
    // Bottleneck: best cached tuple first, the oracle otherwise.
    const SoftmaxFrame frame = softmax_frame(st);
    const CachedTuple* pick = nullptr;
    double pick_v = kInf;
    for (const CachedTuple& ct : cache) {
      const double v = derivative_in_frame(st, frame, ct.c, ct.t);
      if (v < pick_v) {
        pick_v = v;
        pick = &ct;
      }
    }
    CachedTuple chosen;
    if (pick != nullptr && pick_v <= threshold) {
      chosen = *pick;
    } else {
      Vec shifts;
      const std::vector<Vec> p = bottleneck_weights(st, shifts);
      const OracleAnswerArg ans = sc.argamin(DualWeights(p, kInf), st.eps_prime);
      if (!std::isfinite(ans.value)) {
        throw OracleViolation("mwu: ARGAMIN found no admissible tuple");
      }
      if (pick != nullptr) {
        const double cached_obj = pick->c - weight_sum(p, pick->t);
        if (std::isfinite(cached_obj) &&
            ans.value > cached_obj + 2.0 * st.eps_prime + 1e-12 * std::abs(cached_obj)) {
          throw OracleViolation("mwu: ARGAMIN value exceeds a cached tuple's value by more than 2 eps'");
        }
      }
      chosen.t = ans.tuple;
      if (exact_eval) {
        chosen.c = sc.eval(ans.tuple);
        chosen.c_error = 0.0;
      } else {
        chosen.c = ans.value + weight_sum(p, ans.tuple);
        chosen.c_error = st.eps_prime;
      }
      chosen.c = std::max(chosen.c, 1e-12);
      const double v = derivative_in_frame(st, frame, chosen.c, chosen.t);
      if (!(v <= threshold)) {
        result.feasible = false;
        result.iterations = st.iterations;
        return result;
      }
      cache.erase(std::remove_if(cache.begin(), cache.end(),
                                 [&](const CachedTuple& ct) { return ct.t == chosen.t; }),
                  cache.end());
      cache.push_front(chosen);
      if (cache.size() > options.cache_size) cache.pop_back();
    }
    double step = st.lambda / chosen.c;
    for (int i = 0; i < k; ++i) step = std::min(step, m[i][chosen.t[i]]);
    step *= eps;
    st.add(chosen.t, step, chosen.c, chosen.c_error);
    mass += step;
    ++st.iterations;

    if (options.audit) {
      const double excess =
          mwu_potential(st) - (1.0 + eps) * (1.0 + eps) * mass - log_terms;
      result.max_potential_excess = std::max(result.max_potential_excess, excess);
    }
    if (options.early_exit) {
      double s = st.cost_estimate / st.lambda;
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < m.n(); ++j) {
          if (m[i][j] > 0) s = std::max(s, st.marg_cache[i][j] / m[i][j]);
        }
      }
      if (mass >= (1.0 - 4.0 * eps) * s) {
        st.plan.scale(1.0 / s);
        early = true;
        break;
      }
    }
  }
  if (!early) {
    // The rescale divisor from the analysis, raised if needed so that every
    // packing constraint holds for the scaled iterate.
    double s = st.cost_estimate / st.lambda;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < m.n(); ++j) {
        if (m[i][j] > 0) s = std::max(s, st.marg_cache[i][j] / m[i][j]);
      }
    }
    const double divisor = std::max(st.eta_mwu * std::pow(1.0 + eps, 4), s);
    st.plan.scale(1.0 / divisor);
  }
  {
    // marg_cache sums the steps in a different order than the plan does, so
    // the scaled plan can overshoot a marginal by round-off.
    const std::vector<Vec> actual = st.plan.marginals();
    double over = 1.0;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < m.n(); ++j) {
        if (m[i][j] > 0) over = std::max(over, actual[i][j] / m[i][j]);
      }
    }
    if (over > 1.0) st.plan.scale(1.0 / (over * (1.0 + 1e-15)));
  }
  SparsePlan rounded = mwu_round(st.plan, m);
  result.feasible = true;
  result.iterations = st.iterations;
  result.cost = plan_true_cost(rounded, sc);
  result.plan = std::move(rounded);
  return result;
}

StructuredCost affine_cost(const StructuredCost& sc, double a, double b) {
  if (!(a > 0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument("affine_cost: need a > 0 and finite b");
  }
  auto base = std::make_shared<const StructuredCost>(sc);
  StructuredCost out(sc.n(), sc.k(), a * sc.cmax() + std::abs(b), sc.name() + "-affine");
  const auto scale_weights = [a](const DualWeights& p) {
    std::vector<Vec> rows = p.rows();
    for (Vec& row : rows) {
      for (double& x : row) x /= a;
    }
    return DualWeights(std::move(rows), kInf);
  };
  if (sc.supports(Oracle::kMin)) {
    out.set_min([base, a, b, scale_weights](const DualWeights& p) {
      return a * base->min(scale_weights(p)) + b;
    });
  }
  if (sc.supports(Oracle::kArgMin)) {
    out.set_argmin([base, a, b, scale_weights](const DualWeights& p) {
      OracleAnswerArg r = base->argmin(scale_weights(p));
      r.value = a * r.value + b;
      return r;
    });
  }
  if (sc.supports(Oracle::kAMin)) {
    out.set_amin([base, a, b, scale_weights](const DualWeights& p, double eps) {
      return a * base->amin(scale_weights(p), eps / a) + b;
    });
  }
  if (sc.supports(Oracle::kArgAMin)) {
    out.set_argamin([base, a, b, scale_weights](const DualWeights& p, double eps) {
      OracleAnswerArg r = base->argamin(scale_weights(p), eps / a);
      r.value = a * r.value + b;
      return r;
    });
  }
  if (sc.supports(Oracle::kSMin)) {
    out.set_smin([base, a, b, scale_weights](const DualWeights& p, double eta) {
      return a * base->smin(scale_weights(p), eta * a) + b;
    });
  }
  if (sc.supports(Oracle::kMarg)) {
    out.set_log_marg([base, a, b](const std::vector<Vec>& log_d, double eta, int i) {
      Vec r = base->log_marg(log_d, eta * a, i);
      for (double& x : r) x -= eta * b;
      return r;
    });
  }
  if (sc.has_eval()) {
    out.set_eval([base, a, b](const Tuple& t) { return a * base->eval(t) + b; },
                 sc.eval_matches_oracles());
  }
  return out;
}

SolveReport mwu_solve(const StructuredCost& sc_in, const Marginals& m, double eps,
                      const MwuOptions& options) {
  if (!(eps > 0) || !std::isfinite(eps)) {
    throw InvalidArgument("mwu: eps must be positive and finite");
  }
  const auto t0 = Clock::now();
  const StructuredCost sc = complete_oracles(sc_in);
  if (!sc.supports(Oracle::kArgAMin)) {
    throw CapabilityError(sc.name() + ": MWU needs the AMIN or ARGAMIN oracle");
  }
  if (m.n() != sc.n() || m.k() != sc.k()) {
    throw InvalidArgument("mwu: marginals do not match the cost dimensions");
  }
  const long calls0 = sc.oracle_calls();
  SolveReport report;
  report.status = SolveStatus::kApprox;
  const double cmax = sc.cmax();
  if (!std::isfinite(cmax)) throw InvalidArgument("mwu: cmax must be finite");
  if (cmax == 0.0) {
    SparsePlan plan = mwu_round(SparsePlan(m.n(), m.k()), m);
    report.value = 0.0;
    report.lower_bound = 0.0;
    report.status = SolveStatus::kOptimal;
    report.max_violation = max_marginal_violation(plan.marginals(), m);
    report.plan = std::move(plan);
    report.oracle_calls = sc.oracle_calls() - calls0;
    report.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
    return report;
  }
  // C' = (C + 3 cmax) / (2 cmax) has entries in [1, 2].
  const double a = 1.0 / (2.0 * cmax);
  const StructuredCost scaled = affine_cost(sc, a, 1.5);
  // Bisection gap plus the 8 eps_r rounding slack stay within eps / (2 cmax)
  // in rescaled units, which is eps in the original units.
  const double eps_r = std::min(0.5, options.eps_scale * eps / (2.0 * cmax));
  const double resolution = eps / (4.0 * cmax);

  std::optional<SparsePlan> best;
  double best_scaled = kInf;
  const auto consider = [&](MwuResult& r) {
    report.iterations += r.iterations;
    if (r.feasible && r.cost < best_scaled) {
      best_scaled = r.cost;
      best = std::move(r.plan);
    }
  };
  double lo = 1.0;
  double hi = 2.0;
  {
    MwuResult r = mwu_feasibility(scaled, m, hi, eps_r, options);
    if (!r.feasible) {
      throw OracleViolation("mwu: lambda = 2 reported infeasible for a cost in [1, 2]");
    }
    consider(r);
    hi = std::min(hi, best_scaled);
  }
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    MwuResult r = mwu_feasibility(scaled, m, mid, eps_r, options);
    const bool ok = r.feasible;
    consider(r);
    if (ok) {
      hi = std::min(mid, best_scaled);
    } else {
      lo = mid;
    }
  }
  report.value = plan_true_cost(*best, sc);
  // Every infeasible lambda was certified, so OPT' >= lo in rescaled units.
  report.lower_bound = (lo - 1.5) / a;
  report.max_violation = max_marginal_violation(best->marginals(), m);
  report.plan = std::move(best);
  report.oracle_calls = sc.oracle_calls() - calls0;
  report.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  return report;
}

}  // namespace motkit
