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

#include "motkit/core.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace motkit {

std::uint64_t brute_force_cap() {
  const char* env = std::getenv("MOTKIT_BRUTE_CAP");
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v >= 1) return static_cast<std::uint64_t>(v);
  }
  return 1000000;
}

std::uint64_t checked_power(int n, int k, std::uint64_t cap) {
  if (n < 1 || k < 1) throw InvalidArgument("n and k must be positive");
  std::uint64_t total = 1;
  for (int i = 0; i < k; ++i) {
    if (total > cap / static_cast<std::uint64_t>(n)) {
      throw CapExceeded("n^k = " + std::to_string(n) + "^" + std::to_string(k) +
                        " exceeds the brute-force cap " + std::to_string(cap));
    }
    total *= static_cast<std::uint64_t>(n);
  }
  if (total > cap) {
    throw CapExceeded("n^k exceeds the brute-force cap " + std::to_string(cap));
  }
  return total;
}

std::uint64_t linear_index(const Tuple& t, int n) {
  std::uint64_t index = 0;
  for (int j : t) index = index * static_cast<std::uint64_t>(n) + j;
  return index;
}

Tuple tuple_from_index(std::uint64_t index, int n, int k) {
  Tuple t(k);
  for (int i = k - 1; i >= 0; --i) {
    t[i] = static_cast<int>(index % n);
    index /= n;
  }
  return t;
}

bool next_tuple(Tuple& t, int n) {
  for (int i = static_cast<int>(t.size()) - 1; i >= 0; --i) {
    if (++t[i] < n) return true;
    t[i] = 0;
  }
  return false;
}

std::size_t TupleHash::operator()(const Tuple& t) const {
  std::size_t h = 1469598103934665603ull;
  for (int j : t) {
    h ^= static_cast<std::size_t>(j) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

double log_sum_exp(std::span<const double> x) {
  double hi = -kInf;
  for (double v : x) hi = std::max(hi, v);
  if (hi == -kInf || hi == kInf) return hi;
  double s = 0.0;
  for (double v : x) s += std::exp(v - hi);
  return hi + std::log(s);
}

void LogSumAccumulator::add(double x) {
  if (x == -kInf) return;
  if (x <= hi_) {
    sum_ += std::exp(x - hi_);
  } else {
    sum_ = sum_ * std::exp(hi_ - x) + 1.0;
    hi_ = x;
  }
}

double LogSumAccumulator::value() const {
  if (hi_ == -kInf) return -kInf;
  return hi_ + std::log(sum_);
}

double softmin(std::span<const double> values, double eta) {
  if (!(eta > 0)) throw InvalidArgument("softmin: eta must be positive");
  if (values.empty()) throw InvalidArgument("softmin: empty input");
  double lo = kInf;
  for (double a : values) {
    if (std::isnan(a)) throw DomainError("softmin: NaN input");
    if (a == -kInf) throw DomainError("softmin: -inf input has no finite softmin");
    lo = std::min(lo, a);
  }
  if (lo == kInf) return kInf;
  double s = 0.0;
  for (double a : values) s += std::exp(-eta * (a - lo));
  return lo - std::log(s) / eta;
}

Marginals::Marginals(std::vector<Vec> mu) : mu_(std::move(mu)) {
  k_ = static_cast<int>(mu_.size());
  if (k_ < 1) throw InvalidArgument("marginals: need k >= 1");
  n_ = static_cast<int>(mu_[0].size());
  if (n_ < 1) throw InvalidArgument("marginals: need n >= 1");
  for (int i = 0; i < k_; ++i) {
    if (static_cast<int>(mu_[i].size()) != n_) {
      throw InvalidArgument("marginals: all vectors must have length n");
    }
    double s = 0.0;
    for (double v : mu_[i]) {
      if (!(v >= 0) || !std::isfinite(v)) {
        throw InvalidArgument("marginals: entries must be finite and >= 0");
      }
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) {
      throw InvalidArgument("marginals: vector " + std::to_string(i) +
                            " sums to " + std::to_string(s) + ", not 1");
    }
  }
}

Marginals Marginals::uniform(int n, int k) {
  if (n < 1 || k < 1) throw InvalidArgument("marginals: n and k must be >= 1");
  return Marginals(std::vector<Vec>(k, Vec(n, 1.0 / n)));
}

DualWeights::DualWeights(std::vector<Vec> p, double bound) : p_(std::move(p)) {
  k_ = static_cast<int>(p_.size());
  if (k_ < 1) throw InvalidArgument("weights: need k >= 1");
  n_ = static_cast<int>(p_[0].size());
  if (n_ < 1) throw InvalidArgument("weights: need n >= 1");
  for (const Vec& row : p_) {
    if (static_cast<int>(row.size()) != n_) {
      throw InvalidArgument("weights: all rows must have length n");
    }
    for (double v : row) {
      if (std::isnan(v) || v == kInf) {
        throw InvalidArgument("weights: entries must be real or -inf");
      }
      if (v != -kInf && std::abs(v) > bound) {
        throw InvalidArgument("weights: finite entry exceeds magnitude bound");
      }
    }
  }
}

DualWeights DualWeights::zeros(int n, int k) {
  return DualWeights(std::vector<Vec>(k, Vec(n, 0.0)));
}

bool DualWeights::all_finite() const {
  for (const Vec& row : p_) {
    for (double v : row) {
      if (v == -kInf) return false;
    }
  }
  return true;
}

double DualWeights::sum_at(const Tuple& t) const {
  double s = 0.0;
  for (int i = 0; i < k_; ++i) s += p_[i][t[i]];
  return s;
}

double DualWeights::row_max_abs(int i) const {
  double m = 0.0;
  for (double v : p_[i]) {
    if (v != -kInf) m = std::max(m, std::abs(v));
  }
  return m;
}

DualWeights DualWeights::with_row(int i, Vec row) const {
  DualWeights copy = *this;
  if (static_cast<int>(row.size()) != n_) {
    throw InvalidArgument("weights: replacement row has wrong length");
  }
  copy.p_[i] = std::move(row);
  return copy;
}

SparsePlan::SparsePlan(int n, int k) : n_(n), k_(k) {
  if (n < 1 || k < 1) throw InvalidArgument("plan: n and k must be >= 1");
}

void SparsePlan::add(const Tuple& t, double mass) {
  if (static_cast<int>(t.size()) != k_) {
    throw InvalidArgument("plan: tuple has wrong length");
  }
  for (int j : t) {
    if (j < 0 || j >= n_) throw InvalidArgument("plan: tuple entry out of range");
  }
  auto it = position_.find(t);
  if (it == position_.end()) {
    position_.emplace(t, entries_.size());
    entries_.push_back({t, mass});
  } else {
    entries_[it->second].mass += mass;
  }
}

std::size_t SparsePlan::nnz() const {
  std::size_t c = 0;
  for (const PlanEntry& e : entries_) c += e.mass > 0 ? 1 : 0;
  return c;
}

double SparsePlan::total_mass() const {
  double s = 0.0;
  for (const PlanEntry& e : entries_) s += e.mass;
  return s;
}

std::vector<Vec> SparsePlan::marginals() const {
  std::vector<Vec> m(k_, Vec(n_, 0.0));
  for (const PlanEntry& e : entries_) {
    for (int i = 0; i < k_; ++i) m[i][e.index[i]] += e.mass;
  }
  return m;
}

void SparsePlan::scale(double s) {
  for (PlanEntry& e : entries_) e.mass *= s;
}

void SparsePlan::prune(double threshold) {
  std::vector<PlanEntry> kept;
  for (PlanEntry& e : entries_) {
    if (e.mass > threshold) kept.push_back(std::move(e));
  }
  entries_ = std::move(kept);
  position_.clear();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    position_.emplace(entries_[i].index, i);
  }
}

DenseTensor::DenseTensor(int n, int k, std::uint64_t cap) : n_(n), k_(k) {
  values_.assign(checked_power(n, k, cap), 0.0);
}

DenseTensor::DenseTensor(int n, int k, Vec values, std::uint64_t cap)
    : n_(n), k_(k), values_(std::move(values)) {
  if (values_.size() != checked_power(n, k, cap)) {
    throw InvalidArgument("dense tensor: value count must equal n^k");
  }
}

DenseTensor DenseTensor::from_function(
    int n, int k, const std::function<double(const Tuple&)>& f,
    std::uint64_t cap) {
  DenseTensor t(n, k, cap);
  Tuple j(k, 0);
  std::size_t idx = 0;
  do {
    t.values_[idx++] = f(j);
  } while (next_tuple(j, n));
  return t;
}

double DenseTensor::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double max_marginal_violation(const std::vector<Vec>& plan_marginals,
                              const Marginals& m) {
  if (static_cast<int>(plan_marginals.size()) != m.k()) {
    throw InvalidArgument("marginal count mismatch");
  }
  double worst = 0.0;
  for (int i = 0; i < m.k(); ++i) {
    if (static_cast<int>(plan_marginals[i].size()) != m.n()) {
      throw InvalidArgument("marginal length mismatch");
    }
    for (int j = 0; j < m.n(); ++j) {
      worst = std::max(worst, std::abs(plan_marginals[i][j] - m[i][j]));
    }
  }
  return worst;
}

bool check_feasible(const SparsePlan& plan, const Marginals& m, double tol) {
  if (plan.n() != m.n() || plan.k() != m.k()) {
    throw InvalidArgument("check_feasible: plan and marginal dims differ");
  }
  for (const PlanEntry& e : plan.entries()) {
    if (e.mass < -tol) return false;
  }
  return max_marginal_violation(plan.marginals(), m) <= tol;
}

bool check_feasible(const DenseTensor& plan, const Marginals& m, double tol) {
  if (plan.n() != m.n() || plan.k() != m.k()) {
    throw InvalidArgument("check_feasible: plan and marginal dims differ");
  }
  for (double v : plan.values()) {
    if (v < -tol) return false;
  }
  std::vector<Vec> margs;
  for (int i = 0; i < m.k(); ++i) margs.push_back(dense_marginal(plan, i));
  return max_marginal_violation(margs, m) <= tol;
}

double plan_cost(const SparsePlan& plan,
                 const std::function<double(const Tuple&)>& cost_eval) {
  double s = 0.0;
  for (const PlanEntry& e : plan.entries()) {
    if (e.mass != 0.0) s += e.mass * cost_eval(e.index);
  }
  return s;
}

namespace {

double entropy_of(std::span<const double> masses) {
  double total = 0.0;
  double h = 0.0;
  for (double p : masses) {
    if (p < 0) throw DomainError("entropy: negative mass");
    total += p;
    if (p > 0) h -= p * std::log(p);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("entropy: total mass must be 1");
  }
  return h;
}

}  // namespace

double entropy(const SparsePlan& plan) {
  Vec masses;
  masses.reserve(plan.entries().size());
  for (const PlanEntry& e : plan.entries()) masses.push_back(e.mass);
  return entropy_of(masses);
}

double entropy(const DenseTensor& plan) { return entropy_of(plan.values()); }

Vec dense_marginal(const DenseTensor& t, int i) {
  if (i < 0 || i >= t.k()) throw InvalidArgument("dense_marginal: bad index");
  const int n = t.n();
  // Stride of coordinate i in the row-major layout.
  std::uint64_t stride = 1;
  for (int s = i + 1; s < t.k(); ++s) stride *= n;
  Vec m(n, 0.0);
  const Vec& v = t.values();
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    m[(idx / stride) % n] += v[idx];
  }
  return m;
}

}  // namespace motkit
