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

#include "motkit/lowrank.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>

namespace motkit {

namespace {

std::vector<Vec> scaled_rows(const DualWeights& p, double eta) {
  std::vector<Vec> rows(p.rows());
  for (Vec& row : rows) {
    for (double& x : row) x = x == -kInf ? -kInf : eta * x;
  }
  return rows;
}

double row_sum_at(const std::vector<Vec>& log_d, const Tuple& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += log_d[i][t[i]];
  return s;
}

void check_eta(double eta) {
  if (!(eta > 0) || !std::isfinite(eta)) {
    throw InvalidArgument("low-rank: eta must be positive and finite");
  }
}

// Relative size of the mass outside S below which the subtraction in
// combine_sparse is replaced by a direct sum over the complement of S.
constexpr double kCancellation = 1e-4;

void check_eps(double eps) {
  if (!(eps > 0) || !std::isfinite(eps)) {
    throw InvalidArgument("low-rank: eps must be positive and finite");
  }
}

}  // namespace

LowRankPlusSparseCost::LowRankPlusSparseCost(LowRankFactors r, SparseComponent s,
                                             LowRankOptions options)
    : r_(make_lowrank_factors(r.n, r.k, std::move(r.u), r.rmax)),
      s_(std::move(s)),
      options_(options) {
  validate_sparse(s_, r_.n, r_.k);
  std::sort(s_.entries.begin(), s_.entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  double smax = 0.0;
  for (const SparseEntry& e : s_.entries) {
    smax = std::max(smax, std::abs(e.value));
    sparse_tuples_.push_back(e.index);
  }
  cmax_ = r_.rmax + smax;
  build_cylinders(0, sparse_tuples_.size(), Tuple{});
}

void LowRankPlusSparseCost::build_cylinders(std::size_t lo, std::size_t hi,
                                            const Tuple& prefix) {
  // sparse_tuples_[lo, hi) share `prefix`. Values of the next coordinate not
  // taken by any of them start a cylinder; taken values recurse.
  const std::size_t m = prefix.size();
  if (static_cast<int>(m) == r_.k) return;
  Tuple next = prefix;
  next.push_back(0);
  std::size_t pos = lo;
  for (int a = 0; a < r_.n; ++a) {
    std::size_t end = pos;
    while (end < hi && sparse_tuples_[end][m] == a) ++end;
    next[m] = a;
    if (end == pos) {
      cylinders_.push_back(next);
    } else {
      build_cylinders(pos, end, next);
    }
    pos = end;
  }
}

std::vector<Vec> LowRankPlusSparseCost::masked_rows(const std::vector<Vec>& log_d,
                                                    const Tuple& prefix) const {
  std::vector<Vec> rows = log_d;
  for (std::size_t c = 0; c < prefix.size(); ++c) {
    for (int j = 0; j < r_.n; ++j) {
      if (j != prefix[c]) rows[c][j] = -kInf;
    }
  }
  return rows;
}

double LowRankPlusSparseCost::outside_log_partition(
    const std::function<double(const std::vector<Vec>&)>& log_part,
    const std::vector<Vec>& log_d) const {
  Vec parts;
  parts.reserve(cylinders_.size());
  for (const Tuple& cyl : cylinders_) parts.push_back(log_part(masked_rows(log_d, cyl)));
  return parts.empty() ? -kInf : log_sum_exp(parts);
}

Vec LowRankPlusSparseCost::outside_log_marg(
    const std::function<Vec(const std::vector<Vec>&)>& log_marg_fn,
    const std::vector<Vec>& log_d) const {
  std::vector<Vec> parts(r_.n);
  for (const Tuple& cyl : cylinders_) {
    const Vec lm = log_marg_fn(masked_rows(log_d, cyl));
    for (int j = 0; j < r_.n; ++j) parts[j].push_back(lm[j]);
  }
  Vec out(r_.n, -kInf);
  for (int j = 0; j < r_.n; ++j) {
    if (!parts[j].empty()) out[j] = log_sum_exp(parts[j]);
  }
  return out;
}

double LowRankPlusSparseCost::sparse_value(const Tuple& t) const {
  auto it = std::lower_bound(sparse_tuples_.begin(), sparse_tuples_.end(), t);
  if (it == sparse_tuples_.end() || *it != t) return 0.0;
  return s_.entries[it - sparse_tuples_.begin()].value;
}

double LowRankPlusSparseCost::evaluate(const Tuple& t) const {
  return r_.evaluate(t) + sparse_value(t);
}

std::shared_ptr<const LowRankPlusSparseCost::Lift> LowRankPlusSparseCost::lift(
    double eta, double eps) const {
  if (options_.backend == LowRankBackend::kQuantized) return nullptr;
  std::lock_guard<std::mutex> lock(mu_);
  const auto key = std::make_pair(eta, eps);
  if (auto it = lifts_.find(key); it != lifts_.end()) return it->second;
  if (lift_failed_.count(key)) return nullptr;
  try {
    const double eps_tilde = eps / 3.0 * std::exp(-eta * r_.rmax);
    auto lf = std::make_shared<Lift>();
    lf->q = poly_approx_exp(eta, r_.rmax, eps_tilde);
    lf->l = lift_lowrank_exp(r_, lf->q, options_.rank_cap);
    lifts_[key] = lf;
    return lf;
  } catch (const PrecisionError&) {
    if (options_.backend == LowRankBackend::kLift) throw;
  } catch (const CapExceeded&) {
    if (options_.backend == LowRankBackend::kLift) throw;
  } catch (const InvalidArgument&) {
    // eps_tilde underflows to zero far outside the envelope.
    if (options_.backend == LowRankBackend::kLift) {
      throw PrecisionError("low-rank lift: eps_tilde underflows at eta * rmax = " +
                           std::to_string(eta * r_.rmax));
    }
  }
  lift_failed_[key] = true;
  return nullptr;
}

bool LowRankPlusSparseCost::uses_lift(double eta, double eps) const {
  return lift(eta, eps) != nullptr;
}

std::shared_ptr<const QuantizedProduct> LowRankPlusSparseCost::quantized(
    double eps_b) const {
  check_eps(eps_b);
  std::lock_guard<std::mutex> lock(mu_);
  if (auto it = quantized_.find(eps_b); it != quantized_.end()) return it->second;
  auto qp = std::make_shared<const QuantizedProduct>(r_, eps_b, options_.state_cap);
  quantized_[eps_b] = qp;
  return qp;
}

double LowRankPlusSparseCost::lift_value(const Lift& lf, const Tuple& t) {
  long double total = 0.0L;
  for (const auto& term : lf.l.u) {
    long double prod = 1.0L;
    for (std::size_t i = 0; i < t.size(); ++i) prod *= term[i][t[i]];
    total += prod;
  }
  return static_cast<double>(total);
}

double LowRankPlusSparseCost::lift_log_partition(
    const Lift& lf, const std::vector<Vec>& log_d) const {
  const int k = r_.k;
  const int n = r_.n;
  Vec shift(k);
  std::vector<Vec> d(k, Vec(n));
  for (int i = 0; i < k; ++i) {
    shift[i] = *std::max_element(log_d[i].begin(), log_d[i].end());
    if (shift[i] == -kInf) return -kInf;
    for (int j = 0; j < n; ++j) d[i][j] = std::exp(log_d[i][j] - shift[i]);
  }
  const double total = marginalize_scaled_lowrank(d, lf.l);
  if (!(total > 0)) {
    throw PrecisionError("low-rank lift: scaled mass is not positive");
  }
  double s = 0.0;
  for (double x : shift) s += x;
  return std::log(total) + s;
}

Vec LowRankPlusSparseCost::lift_log_marg(const Lift& lf,
                                         const std::vector<Vec>& log_d,
                                         int i) const {
  const int k = r_.k;
  const int n = r_.n;
  Vec shift(k, 0.0);
  std::vector<Vec> d(k, Vec(n));
  double rest_shift = 0.0;
  for (int c = 0; c < k; ++c) {
    shift[c] = *std::max_element(log_d[c].begin(), log_d[c].end());
    if (shift[c] == -kInf) return Vec(n, -kInf);
    for (int j = 0; j < n; ++j) d[c][j] = std::exp(log_d[c][j] - shift[c]);
    if (c != i) rest_shift += shift[c];
  }
  // Extended precision for the same reason as marginalize_scaled_lowrank.
  std::vector<long double> acc(n, 0.0L);
  for (const auto& term : lf.l.u) {
    long double prod = 1.0L;
    for (int c = 0; c < k; ++c) {
      if (c == i) continue;
      long double dot = 0.0L;
      for (int j = 0; j < n; ++j) dot += static_cast<long double>(d[c][j]) * term[c][j];
      prod *= dot;
    }
    for (int j = 0; j < n; ++j) acc[j] += prod * term[i][j];
  }
  Vec out(n);
  for (int j = 0; j < n; ++j) {
    if (log_d[i][j] == -kInf) {
      out[j] = -kInf;
      continue;
    }
    if (!(acc[j] > 0)) {
      throw PrecisionError("low-rank lift: marginal entry is not positive");
    }
    out[j] = static_cast<double>(std::log(acc[j])) + rest_shift + log_d[i][j];
  }
  return out;
}

double LowRankPlusSparseCost::combine_sparse(
    double log_base, const Vec& log_terms, const Vec& factors,
    const std::function<double()>& exact_outside) const {
  double hi = log_base;
  for (std::size_t e = 0; e < log_terms.size(); ++e) {
    hi = std::max({hi, log_terms[e], log_terms[e] + factors[e]});
  }
  if (hi == -kInf) return -kInf;
  // Mass outside S, then the S tuples at their true weight. factors[e] is
  // the log reweighting -eta S_e.
  const double base = log_base == -kInf ? 0.0 : std::exp(log_base - hi);
  double inside = 0.0;
  double reweighted = 0.0;
  for (std::size_t e = 0; e < log_terms.size(); ++e) {
    if (log_terms[e] == -kInf) continue;
    const double t = std::exp(log_terms[e] - hi);
    inside += t;
    reweighted += std::exp(log_terms[e] + factors[e] - hi);
  }
  double outside = base - inside;
  // When S carries most of the base mass the subtraction loses the digits
  // that matter; sum the complement of S directly instead.
  if (outside < kCancellation * base) {
    const double lo = exact_outside();
    outside = lo == -kInf ? 0.0 : std::exp(lo - hi);
  }
  const double sum = outside + reweighted;
  if (!(sum > 0)) return -kInf;
  return hi + std::log(sum);
}

double LowRankPlusSparseCost::quantized_smin(const DualWeights& p, double eta,
                                             double eps_b) const {
  check_eta(eta);
  if (p.n() != n() || p.k() != k()) throw InvalidArgument("low-rank: weight shape");
  const auto qp = quantized(eps_b);
  const std::vector<Vec> log_d = scaled_rows(p, eta);
  const double log_b = qp->log_partition(log_d, eta);
  Vec terms;
  Vec factors;
  for (const SparseEntry& e : s_.entries) {
    terms.push_back(row_sum_at(log_d, e.index) - eta * qp->eval(e.index));
    factors.push_back(-eta * e.value);
  }
  const double total = combine_sparse(log_b, terms, factors, [&] {
    return outside_log_partition(
        [&](const std::vector<Vec>& rows) { return qp->log_partition(rows, eta); }, log_d);
  });
  return total == -kInf ? kInf : -total / eta;
}

Vec LowRankPlusSparseCost::quantized_log_marg(const std::vector<Vec>& log_d,
                                              double eta, int i,
                                              double eps_b) const {
  check_eta(eta);
  const auto qp = quantized(eps_b);
  Vec base = qp->log_marg(log_d, eta, i);
  if (s_.entries.empty()) return base;
  std::vector<Vec> terms(n());
  std::vector<Vec> factors(n());
  for (const SparseEntry& e : s_.entries) {
    const int j = e.index[i];
    terms[j].push_back(row_sum_at(log_d, e.index) - eta * qp->eval(e.index));
    factors[j].push_back(-eta * e.value);
  }
  std::optional<Vec> exact;
  for (int j = 0; j < n(); ++j) {
    base[j] = combine_sparse(base[j], terms[j], factors[j], [&] {
      if (!exact) {
        exact = outside_log_marg(
            [&](const std::vector<Vec>& rows) { return qp->log_marg(rows, eta, i); }, log_d);
      }
      return (*exact)[j];
    });
  }
  return base;
}

double LowRankPlusSparseCost::smin(const DualWeights& p, double eta,
                                   double eps) const {
  check_eta(eta);
  check_eps(eps);
  if (p.n() != n() || p.k() != k()) throw InvalidArgument("low-rank: weight shape");
  const auto lf = lift(eta, eps);
  if (!lf) return quantized_smin(p, eta, eps / 2.0);
  const std::vector<Vec> log_d = scaled_rows(p, eta);
  const double log_b = lift_log_partition(*lf, log_d);
  Vec terms;
  Vec factors;
  for (const SparseEntry& e : s_.entries) {
    const double l = lift_value(*lf, e.index);
    if (!(l > 0)) throw PrecisionError("low-rank lift: nonpositive lifted entry");
    terms.push_back(row_sum_at(log_d, e.index) + std::log(l));
    factors.push_back(-eta * e.value);
  }
  const double total = combine_sparse(log_b, terms, factors, [&] {
    return outside_log_partition(
        [&](const std::vector<Vec>& rows) { return lift_log_partition(*lf, rows); }, log_d);
  });
  return total == -kInf ? kInf : -total / eta;
}

Vec LowRankPlusSparseCost::log_marg(const std::vector<Vec>& log_d, double eta,
                                    int i, double eps) const {
  check_eta(eta);
  check_eps(eps);
  if (i < 0 || i >= k()) throw InvalidArgument("low-rank: bad coordinate");
  const auto lf = lift(eta, eps);
  if (!lf) return quantized_log_marg(log_d, eta, i, eps / 2.0);
  Vec base = lift_log_marg(*lf, log_d, i);
  if (s_.entries.empty()) return base;
  std::vector<Vec> terms(n());
  std::vector<Vec> factors(n());
  for (const SparseEntry& e : s_.entries) {
    const double l = lift_value(*lf, e.index);
    if (!(l > 0)) throw PrecisionError("low-rank lift: nonpositive lifted entry");
    terms[e.index[i]].push_back(row_sum_at(log_d, e.index) + std::log(l));
    factors[e.index[i]].push_back(-eta * e.value);
  }
  std::optional<Vec> exact;
  for (int j = 0; j < n(); ++j) {
    base[j] = combine_sparse(base[j], terms[j], factors[j], [&] {
      if (!exact) {
        exact = outside_log_marg(
            [&](const std::vector<Vec>& rows) { return lift_log_marg(*lf, rows, i); }, log_d);
      }
      return (*exact)[j];
    });
  }
  return base;
}

double LowRankPlusSparseCost::amin(const DualWeights& p, double eps) const {
  check_eps(eps);
  const double eta =
      n() > 1 ? 2.0 * k() * std::log(static_cast<double>(n())) / eps : 1.0 / eps;
  return smin(p, eta, eps);
}

double LowRankPlusSparseCost::ctilde(const Tuple& t, double eta, double eps) const {
  const auto lf = lift(eta, eps);
  if (!lf) return quantized(eps / 2.0)->eval(t) + sparse_value(t);
  const double l = lift_value(*lf, t);
  if (!(l > 0)) throw PrecisionError("low-rank lift: nonpositive lifted entry");
  return -std::log(l) / eta + sparse_value(t);
}

LiftAudit LowRankPlusSparseCost::audit_lift(double eta, double eps,
                                            std::size_t samples,
                                            std::uint64_t seed) const {
  check_eta(eta);
  check_eps(eps);
  const auto lf = lift(eta, eps);
  if (!lf) {
    throw PrecisionError("low-rank lift: unavailable at eta * rmax = " +
                         std::to_string(eta * r_.rmax));
  }
  LiftAudit audit;
  audit.eps_tilde = eps / 3.0 * std::exp(-eta * r_.rmax);
  audit.cost_budget = eps / 2.0;
  audit.rank = lf->l.u.size();
  audit.degree = lf->q.degree;
  const auto check = [&](const Tuple& t) {
    const double rv = r_.evaluate(t);
    const double l = lift_value(*lf, t);
    audit.lift_error = std::max(audit.lift_error, std::abs(l - std::exp(-eta * rv)));
    const double ct = l > 0 ? -std::log(l) / eta : kInf;
    audit.cost_error = std::max(audit.cost_error, std::abs(ct - rv));
    ++audit.samples;
  };
  const double total = std::pow(static_cast<double>(n()), k());
  if (total <= static_cast<double>(samples)) {
    Tuple t(k(), 0);
    do {
      check(t);
    } while (next_tuple(t, n()));
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n() - 1);
    Tuple t(k());
    for (std::size_t s = 0; s < samples; ++s) {
      for (int& x : t) x = pick(rng);
      check(t);
    }
  }
  return audit;
}

double lr_smin(const LowRankPlusSparseCost& c, const DualWeights& p, double eta,
               double eps) {
  return c.smin(p, eta, eps);
}

double lr_amin(const LowRankPlusSparseCost& c, const DualWeights& p, double eps) {
  return c.amin(p, eps);
}

StructuredCost make_lowrank_cost(std::shared_ptr<const LowRankPlusSparseCost> c,
                                 double eps) {
  check_eps(eps);
  StructuredCost sc(c->n(), c->k(), c->cmax(), "lowrank");
  sc.set_smin([c, eps](const DualWeights& p, double eta) {
      return c->smin(p, eta, eps);
    })
      .set_log_marg([c, eps](const std::vector<Vec>& log_d, double eta, int i) {
        return c->log_marg(log_d, eta, i, eps);
      })
      .set_amin([c](const DualWeights& p, double e) { return c->amin(p, e); })
      .set_eval([c](const Tuple& t) { return c->evaluate(t); }, false);
  return complete_oracles(sc);
}

StructuredCost quantized_view(std::shared_ptr<const LowRankPlusSparseCost> c,
                              double eps_b) {
  const auto qp = c->quantized(eps_b);
  double smax = 0.0;
  for (const SparseEntry& e : c->sparse().entries) smax = std::max(smax, std::abs(e.value));
  StructuredCost sc(c->n(), c->k(), qp->max_abs() + smax, "lowrank-quantized");
  const auto argmin = [c, qp](const DualWeights& p) {
    std::vector<Vec> w(p.rows());
    for (Vec& row : w) {
      for (double& x : row) x = x == -kInf ? kInf : -x;
    }
    OracleAnswerArg best = qp->argmin(w, c->sparse_tuples());
    for (const SparseEntry& e : c->sparse().entries) {
      const double wsum = p.sum_at(e.index);
      if (wsum == -kInf) continue;
      const double v = qp->eval(e.index) + e.value - wsum;
      const double tol = kTieRelTol * (1.0 + std::abs(std::min(v, best.value)));
      if (v < best.value - tol ||
          (v <= best.value + tol && (best.value == kInf || e.index < best.tuple))) {
        best = {e.index, v};
      }
    }
    return best;
  };
  sc.set_argmin(argmin)
      .set_min([argmin](const DualWeights& p) { return argmin(p).value; })
      .set_smin([c, eps_b](const DualWeights& p, double eta) {
        return c->quantized_smin(p, eta, eps_b);
      })
      .set_log_marg([c, eps_b](const std::vector<Vec>& log_d, double eta, int i) {
        return c->quantized_log_marg(log_d, eta, i, eps_b);
      })
      .set_eval([c, qp](const Tuple& t) { return qp->eval(t) + c->sparse_value(t); });
  return complete_oracles(sc);
}

}  // namespace motkit
