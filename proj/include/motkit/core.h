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

#ifndef MOTKIT_CORE_H_
#define MOTKIT_CORE_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "motkit/errors.h"

namespace motkit {

using Vec = std::vector<double>;
// A multi-index (j_1, ..., j_k) with 0-based entries in [0, n).
using Tuple = std::vector<int>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Extended reals R u {-inf}. The IEEE value -inf is the -inf flag, so the
// conventions -inf + finite = -inf, exp(-inf) = 0 and log(0) = -inf hold
// natively. +inf is never a valid ExtReal.
using ExtReal = double;
inline bool is_neg_inf(double x) { return x == -kInf; }

inline constexpr double kDefaultWeightBound = 1e12;
inline constexpr double kFeasibilityTol = 1e-9;

// Brute-force enumeration cap on n^k. Reads MOTKIT_BRUTE_CAP when set,
// otherwise 10^6.
std::uint64_t brute_force_cap();

// Returns n^k, throwing CapExceeded when it exceeds `cap`.
std::uint64_t checked_power(int n, int k, std::uint64_t cap);

// Row-major convention shared by every module: the last coordinate varies
// fastest, so index = sum_i j_i * n^(k-1-i).
std::uint64_t linear_index(const Tuple& t, int n);
Tuple tuple_from_index(std::uint64_t index, int n, int k);
// Advances `t` to the next tuple in row-major order. Returns false after the
// last tuple (and resets `t` to all zeros).
bool next_tuple(Tuple& t, int n);

struct TupleHash {
  std::size_t operator()(const Tuple& t) const;
};

// log(sum_i exp(x_i)) with max shift. Entries may be -inf; an empty input or
// an all -inf input yields -inf.
double log_sum_exp(std::span<const double> x);

// Streaming log-sum-exp.
class LogSumAccumulator {
 public:
  void add(double x);
  double value() const;

 private:
  double hi_ = -kInf;
  double sum_ = 0.0;
};

// -(1/eta) log sum_i exp(-eta a_i), with exp(-eta * (+inf)) = 0. Inputs may be
// +inf; all +inf inputs yield +inf. A -inf input is a domain error.
double softmin(std::span<const double> values, double eta);

// k probability vectors on n atoms.
class Marginals {
 public:
  explicit Marginals(std::vector<Vec> mu);
  static Marginals uniform(int n, int k);

  int n() const { return n_; }
  int k() const { return k_; }
  const Vec& operator[](int i) const { return mu_[i]; }
  const std::vector<Vec>& mu() const { return mu_; }

 private:
  int n_;
  int k_;
  std::vector<Vec> mu_;
};

// Oracle weights p = (p_1, ..., p_k), entries in R u {-inf}.
class DualWeights {
 public:
  explicit DualWeights(std::vector<Vec> p, double bound = kDefaultWeightBound);
  static DualWeights zeros(int n, int k);

  int n() const { return n_; }
  int k() const { return k_; }
  const Vec& operator[](int i) const { return p_[i]; }
  const std::vector<Vec>& rows() const { return p_; }
  bool all_finite() const;
  // sum_i p_i[j_i].
  double sum_at(const Tuple& t) const;
  // max_j |p_i[j]| over the finite entries of row i.
  double row_max_abs(int i) const;
  // Copy with row i replaced.
  DualWeights with_row(int i, Vec row) const;

 private:
  int n_;
  int k_;
  std::vector<Vec> p_;
};

struct PlanEntry {
  Tuple index;
  double mass;
};

// Sparse nonnegative tensor over [n]^k stored as unique (tuple, mass) pairs.
class SparsePlan {
 public:
  SparsePlan(int n, int k);

  int n() const { return n_; }
  int k() const { return k_; }
  // Adds `mass` to the entry at `t`, creating it when absent.
  void add(const Tuple& t, double mass);
  const std::vector<PlanEntry>& entries() const { return entries_; }
  // Number of entries with positive mass.
  std::size_t nnz() const;
  double total_mass() const;
  std::vector<Vec> marginals() const;
  void scale(double s);
  // Drops entries with mass <= threshold.
  void prune(double threshold = 0.0);

 private:
  int n_;
  int k_;
  std::vector<PlanEntry> entries_;
  std::unordered_map<Tuple, std::size_t, TupleHash> position_;
};

// Explicit tensor with n^k entries in row-major order.
class DenseTensor {
 public:
  DenseTensor(int n, int k, std::uint64_t cap = brute_force_cap());
  DenseTensor(int n, int k, Vec values, std::uint64_t cap = brute_force_cap());
  static DenseTensor from_function(int n, int k,
                                   const std::function<double(const Tuple&)>& f,
                                   std::uint64_t cap = brute_force_cap());

  int n() const { return n_; }
  int k() const { return k_; }
  std::size_t size() const { return values_.size(); }
  const Vec& values() const { return values_; }
  Vec& mutable_values() { return values_; }
  double at(const Tuple& t) const { return values_[linear_index(t, n_)]; }
  double& at(const Tuple& t) { return values_[linear_index(t, n_)]; }
  double max_abs() const;

 private:
  int n_;
  int k_;
  Vec values_;
};

bool check_feasible(const SparsePlan& plan, const Marginals& m,
                    double tol = kFeasibilityTol);
bool check_feasible(const DenseTensor& plan, const Marginals& m,
                    double tol = kFeasibilityTol);

// Largest entrywise deviation |m_i(P) - mu_i| over all i.
double max_marginal_violation(const std::vector<Vec>& plan_marginals,
                              const Marginals& m);

double plan_cost(const SparsePlan& plan,
                 const std::function<double(const Tuple&)>& cost_eval);

double entropy(const SparsePlan& plan);
double entropy(const DenseTensor& plan);

Vec dense_marginal(const DenseTensor& t, int i);

// Maximum support size nk - k + 1 of a vertex of the transportation polytope.
inline std::size_t vertex_sparsity_bound(int n, int k) {
  return static_cast<std::size_t>(n) * k - k + 1;
}

}  // namespace motkit

#endif  // MOTKIT_CORE_H_
