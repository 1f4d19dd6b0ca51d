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
#include <random>
#include <sstream>
#include <string>

#include "motkit/algorithms.h"

namespace motkit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double l1_error(const Vec& log_m, const Vec& mu) {
  double err = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) err += std::abs(std::exp(log_m[j]) - mu[j]);
  return err;
}

std::vector<Vec> one_hot_weights(const Tuple& t, int n) {
  std::vector<Vec> rows(t.size(), Vec(n, -kInf));
  for (std::size_t i = 0; i < t.size(); ++i) rows[i][t[i]] = 0.0;
  return rows;
}

// Index drawn from the distribution proportional to exp(log_w).
int draw_log_categorical(const Vec& log_w, std::mt19937_64& rng) {
  const double hi = *std::max_element(log_w.begin(), log_w.end());
  if (hi == -kInf) throw DomainError("sampling: conditional marginal has no mass");
  double total = 0.0;
  Vec w(log_w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = std::exp(log_w[j] - hi);
    total += w[j];
  }
  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  int last = -1;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] <= 0) continue;
    last = static_cast<int>(j);
    acc += w[j];
    if (u < acc) return last;
  }
  return last;
}

int draw_categorical(const Vec& w, double total, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  int last = -1;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] <= 0) continue;
    last = static_cast<int>(j);
    acc += w[j];
    if (u < acc) return last;
  }
  return last;
}

}  // namespace

double cost_at(const StructuredCost& sc, const Tuple& t, double eps) {
  if (sc.has_eval()) return sc.eval(t);
  const DualWeights p(one_hot_weights(t, sc.n()));
  if (sc.supports(Oracle::kMin)) return sc.min(p);
  if (sc.supports(Oracle::kAMin)) return sc.amin(p, eps);
  throw CapabilityError(sc.name() + ": cannot evaluate a tuple without eval, MIN or AMIN");
}

std::vector<Vec> ScaledPlan::d() const {
  std::vector<Vec> out = log_d;
  for (Vec& row : out) {
    for (double& x : row) x = std::exp(x);
  }
  return out;
}

double ScaledPlan::log_scaled_entry(const Tuple& t) const {
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += log_d[i][t[i]];
  if (s == -kInf) return -kInf;
  double c;
  if (cost->has_eval() && cost->eval_matches_oracles()) {
    c = cost->eval(t);
  } else {
    c = cost->smin(DualWeights(one_hot_weights(t, n)), eta);
  }
  return s - eta * c;
}

double ScaledPlan::product_entry(const Tuple& t) const {
  double prod = 1.0;
  for (int i = 0; i < k; ++i) prod *= v[i][t[i]];
  return prod;
}

double ScaledPlan::entry(const Tuple& t) const {
  return std::exp(log_scaled_entry(t)) + product_entry(t);
}

double ScaledPlan::scaled_mass() const {
  const Vec lm = cost->log_marg(log_d, eta, 0);
  return std::exp(log_sum_exp(lm));
}

double ScaledPlan::product_mass() const {
  double prod = 1.0;
  for (const Vec& row : v) {
    double s = 0.0;
    for (double x : row) s += x;
    prod *= s;
  }
  return prod;
}

std::vector<Vec> ScaledPlan::marginals() const {
  Vec norms(k, 0.0);
  for (int i = 0; i < k; ++i) {
    for (double x : v[i]) norms[i] += x;
  }
  std::vector<Vec> out(k);
  for (int i = 0; i < k; ++i) {
    const Vec lm = cost->log_marg(log_d, eta, i);
    double others = 1.0;
    for (int s = 0; s < k; ++s) {
      if (s != i) others *= norms[s];
    }
    out[i].resize(n);
    for (int j = 0; j < n; ++j) out[i][j] = std::exp(lm[j]) + v[i][j] * others;
  }
  return out;
}

SolveReport sinkhorn_solve(const StructuredCost& sc, const Marginals& m,
                           double eps, const SinkhornOptions& options) {
  if (!(eps > 0) || !std::isfinite(eps)) {
    throw InvalidArgument("sinkhorn: eps must be positive and finite");
  }
  if (!sc.supports(Oracle::kMarg)) {
    throw CapabilityError(sc.name() + ": SINKHORN needs the MARG oracle (or SMIN to derive it)");
  }
  if (m.n() != sc.n() || m.k() != sc.k()) {
    throw InvalidArgument("sinkhorn: marginals do not match the cost dimensions");
  }
  if (!std::isfinite(sc.cmax())) throw InvalidArgument("sinkhorn: cmax must be finite");
  const auto t0 = Clock::now();
  const long calls0 = sc.oracle_calls();
  const int n = sc.n();
  const int k = sc.k();
  const double eta = n > 1 ? 2.0 * k * std::log(static_cast<double>(n)) / eps : 1.0 / eps;
  const double tol = sc.cmax() > 0 ? eps / (8.0 * sc.cmax()) : kInf;

  std::vector<Vec> log_mu(k, Vec(n));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < n; ++j) log_mu[i][j] = std::log(m[i][j]);
  }
  std::vector<Vec> log_d = log_mu;

  const auto update = [&](int i, const Vec& lm) {
    for (int j = 0; j < n; ++j) {
      if (m[i][j] == 0.0) {
        log_d[i][j] = -kInf;
      } else if (lm[j] == -kInf) {
        throw DegenerateSupport("sinkhorn: marginal " + std::to_string(i) +
                                " has no mass at atom " + std::to_string(j) +
                                " where the target is positive");
      } else {
        log_d[i][j] += log_mu[i][j] - lm[j];
      }
    }
  };

  long sweeps = 0;
  double last_err = kInf;
  while (true) {
    if (sweeps >= options.max_sweeps) {
      std::ostringstream msg;
      msg << "sinkhorn: no convergence after " << sweeps << " sweeps (eta = " << eta
          << ", marginal error " << last_err << ", target " << tol << ")";
      throw ConvergenceError(msg.str());
    }
    double sweep_err = 0.0;
    for (int i = 0; i < k; ++i) {
      const Vec lm = sc.log_marg(log_d, eta, i);
      sweep_err += l1_error(lm, m[i]);
      update(i, lm);
    }
    ++sweeps;
    last_err = sweep_err;
    if (sweep_err <= tol) {
      double exact = 0.0;
      for (int i = 0; i < k; ++i) exact += l1_error(sc.log_marg(log_d, eta, i), m[i]);
      last_err = exact;
      if (exact <= tol) break;
    }
  }

  // Rounding: shrink each scaling vector so that no marginal exceeds its
  // target, then fill the deficit with a rank-one product term.
  for (int i = 0; i < k; ++i) {
    const Vec lm = sc.log_marg(log_d, eta, i);
    for (int j = 0; j < n; ++j) {
      if (m[i][j] == 0.0) {
        log_d[i][j] = -kInf;
      } else if (lm[j] != -kInf) {
        log_d[i][j] += std::min(0.0, log_mu[i][j] - lm[j]);
      }
    }
  }
  ScaledPlan sp;
  sp.n = n;
  sp.k = k;
  sp.eta = eta;
  sp.v.assign(k, Vec(n, 0.0));
  Vec norms(k, 0.0);
  for (int i = 0; i < k; ++i) {
    const Vec lm = sc.log_marg(log_d, eta, i);
    for (int j = 0; j < n; ++j) {
      sp.v[i][j] = std::max(0.0, m[i][j] - std::exp(lm[j]));
      norms[i] += sp.v[i][j];
    }
  }
  bool any_zero = false;
  for (double e : norms) any_zero = any_zero || e <= 0.0;
  if (any_zero) {
    for (Vec& row : sp.v) std::fill(row.begin(), row.end(), 0.0);
  } else {
    double denom = 1.0;
    for (int i = 1; i < k; ++i) denom *= norms[i];
    for (double& x : sp.v[0]) x /= denom;
  }
  sp.log_d = std::move(log_d);
  sp.cost = std::make_shared<const StructuredCost>(sc);

  SolveReport report;
  report.iterations = sweeps;
  report.status = SolveStatus::kApprox;
  const std::vector<Vec> marg = sp.marginals();
  report.max_violation = max_marginal_violation(marg, m);

  const auto true_cost = [&sc](const Tuple& t) { return cost_at(sc, t); };
  std::uint64_t cap = options.exact_value_cap;
  if (!(sc.has_eval() && sc.eval_matches_oracles())) cap = std::min<std::uint64_t>(cap, 4096);
  bool enumerable = true;
  try {
    checked_power(n, k, cap);
  } catch (const CapExceeded&) {
    enumerable = false;
  }
  if (enumerable) {
    report.value = scaled_plan_cost(sp, true_cost, cap);
  } else {
    const SampledCost est = sampled_plan_cost(sp, true_cost, options.seed, options.value_samples);
    report.value = est.mean;
    report.value_stderr = est.stderr_;
  }
  report.scaled = std::move(sp);
  report.oracle_calls = sc.oracle_calls() - calls0;
  report.wall_time = seconds_since(t0);
  return report;
}

std::vector<Tuple> sample_scaled_plan(const ScaledPlan& sp, std::uint64_t seed,
                                      long count) {
  if (count < 0) throw InvalidArgument("sample_scaled_plan: count must be >= 0");
  if (!sp.cost) throw InvalidArgument("sample_scaled_plan: plan has no cost");
  std::mt19937_64 rng(seed);
  const double ms = sp.scaled_mass();
  const double mp = sp.product_mass();
  if (!(ms + mp > 0)) throw DomainError("sample_scaled_plan: plan has no mass");
  Vec norms(sp.k, 0.0);
  for (int i = 0; i < sp.k; ++i) {
    for (double x : sp.v[i]) norms[i] += x;
  }
  std::vector<Tuple> out;
  out.reserve(count);
  for (long s = 0; s < count; ++s) {
    const double u = std::uniform_real_distribution<double>(0.0, ms + mp)(rng);
    Tuple t(sp.k);
    if (u < ms || mp <= 0) {
      std::vector<Vec> cur = sp.log_d;
      for (int i = 0; i < sp.k; ++i) {
        const Vec lm = sp.cost->log_marg(cur, sp.eta, i);
        t[i] = draw_log_categorical(lm, rng);
        for (int j = 0; j < sp.n; ++j) {
          if (j != t[i]) cur[i][j] = -kInf;
        }
      }
    } else {
      for (int i = 0; i < sp.k; ++i) t[i] = draw_categorical(sp.v[i], norms[i], rng);
    }
    out.push_back(std::move(t));
  }
  return out;
}

double scaled_plan_cost(const ScaledPlan& sp,
                        const std::function<double(const Tuple&)>& true_cost,
                        std::uint64_t cap) {
  checked_power(sp.n, sp.k, cap);
  double total = 0.0;
  Tuple t(sp.k, 0);
  do {
    const double p = sp.entry(t);
    if (p > 0) total += p * true_cost(t);
  } while (next_tuple(t, sp.n));
  return total;
}

SampledCost sampled_plan_cost(const ScaledPlan& sp,
                              const std::function<double(const Tuple&)>& true_cost,
                              std::uint64_t seed, long count) {
  if (count < 2) throw InvalidArgument("sampled_plan_cost: need at least two samples");
  const std::vector<Tuple> samples = sample_scaled_plan(sp, seed, count);
  double mean = 0.0;
  double m2 = 0.0;
  long seen = 0;
  for (const Tuple& t : samples) {
    const double c = true_cost(t);
    ++seen;
    const double delta = c - mean;
    mean += delta / seen;
    m2 += delta * (c - mean);
  }
  SampledCost out;
  const double mass = sp.scaled_mass() + sp.product_mass();
  out.mean = mean * mass;
  out.stderr_ = std::sqrt(m2 / (seen - 1) / seen) * mass;
  return out;
}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kApprox:
      return "approx";
    case SolveStatus::kInfeasibleCertificate:
      return "infeasible-certificate";
  }
  return "unknown";
}

}  // namespace motkit
