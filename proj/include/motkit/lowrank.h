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

#ifndef MOTKIT_LOWRANK_H_
#define MOTKIT_LOWRANK_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "motkit/core.h"
#include "motkit/oracles.h"

namespace motkit {

inline constexpr std::size_t kDefaultLiftRankCap = 5000;
inline constexpr std::size_t kDefaultSparseCap = 100000;
inline constexpr std::size_t kDefaultStateCap = 20000000;
// Largest eta * rmax accepted by the polynomial lift.
inline constexpr double kMaxLiftExponent = 50.0;

// R_j = sum_l prod_i u[l][i][j_i].
struct LowRankFactors {
  int n = 0;
  int k = 0;
  // u[l][i] is a length-n vector.
  std::vector<std::vector<Vec>> u;
  // Upper bound on max_j |R_j|.
  double rmax = 0.0;

  int rank() const { return static_cast<int>(u.size()); }
  double evaluate(const Tuple& t) const;
};

// Validates shapes and finiteness. A negative `rmax` is replaced by the bound
// sum_l prod_i max_j |u[l][i][j]|.
LowRankFactors make_lowrank_factors(int n, int k, std::vector<std::vector<Vec>> u,
                                    double rmax = -1.0);

struct SparseEntry {
  Tuple index;
  double value;
};

struct SparseComponent {
  std::vector<SparseEntry> entries;
};

// Sorts entries, rejects duplicate or out-of-range tuples and enforces `cap`.
void validate_sparse(const SparseComponent& s, int n, int k,
                     std::size_t cap = kDefaultSparseCap);

// q(x) = sum_m a[m] x^m approximating exp(-eta x) on [-rmax, rmax].
struct PolyCoeffs {
  int degree = 0;
  Vec a;
  // Largest |exp(-eta x) - q(x)| over the audit grid.
  double certified_error = 0.0;
  double eta = 0.0;
  double rmax = 0.0;

  double operator()(double x) const;
};

// Chebyshev interpolant grown in degree until the grid error is at most
// eps_tilde / 2. Throws PrecisionError when double precision cannot reach
// that accuracy, InvalidArgument when eps_tilde >= exp(-eta rmax).
PolyCoeffs poly_approx_exp(double eta, double rmax, double eps_tilde);

// Factored tensor with entries q(R_j) and rank C(r + m, r).
LowRankFactors lift_lowrank_exp(const LowRankFactors& r, const PolyCoeffs& q,
                                std::size_t rank_cap = kDefaultLiftRankCap);

// m((outer d_i) .* L) = sum_l prod_i <d_i, v_{i,l}>.
double marginalize_scaled_lowrank(const std::vector<Vec>& d,
                                  const LowRankFactors& l);

// Chain dynamic program over a quantized copy R~ of a low-rank tensor. Each
// factor vector must be strictly positive, strictly negative or identically
// zero. Per term, log|u| is rounded coordinatewise to a grid of step delta,
// chosen so that |R~_j - R_j| <= eps_b for every tuple. The running sum of
// grid shifts is the DP state; a term is folded into the weight once its
// last varying coordinate has been processed.
class QuantizedProduct {
 public:
  QuantizedProduct(const LowRankFactors& r, double eps_b,
                   std::size_t state_cap = kDefaultStateCap);

  int n() const { return n_; }
  int k() const { return k_; }
  double eval(const Tuple& t) const;
  // Upper bound on max_j |R~_j|.
  double max_abs() const { return max_abs_; }
  double error_budget() const { return eps_b_; }
  std::size_t max_states() const;

  // log sum_j prod_i d_i[j_i] exp(-eta R~_j).
  double log_partition(const std::vector<Vec>& log_d, double eta) const;
  // log of the i-th marginal of (outer d) .* exp(-eta R~).
  Vec log_marg(const std::vector<Vec>& log_d, double eta, int i) const;

  // Lexicographically smallest minimizer of R~_j + sum_i w_i[j_i] over tuples
  // outside `excluded` (sorted). Entries of w may be +inf to forbid values.
  // Returns value +inf when nothing is allowed.
  OracleAnswerArg argmin(const std::vector<Vec>& w,
                         const std::vector<Tuple>& excluded = {}) const;

 private:
  struct Term {
    double sign;
    double log_coef;
    double delta;
    int base;
    int first;
    int last;
    // shift[i][j] >= 0 for the varying coordinates, empty otherwise.
    std::vector<std::vector<int>> shift;
    std::vector<int> range;
    // value[s] = sign * exp(log_coef + delta * (base + s)).
    Vec value;
  };
  struct Cut {
    std::vector<int> terms;
    std::vector<std::size_t> radix;
    std::vector<std::size_t> stride;
    std::size_t size = 1;
  };
  template <class Visit, class SkipState, class SkipValue>
  void for_each_transition(int i, Visit&& visit, SkipState&& skip_state,
                           SkipValue&& skip_value) const;
  void forward_layer(int i, const Vec& row, double eta, const Vec& in,
                     Vec& out) const;
  void backward_layer(int i, const Vec& row, double eta, const Vec& in,
                      Vec& out) const;
  void min_backward(const std::vector<Vec>& w, std::vector<Vec>& bm) const;
  void refresh_cache(const std::vector<Vec>& log_d, double eta, int need_fwd,
                     int need_bwd) const;

  int n_;
  int k_;
  double eps_b_;
  double const_value_ = 0.0;
  double max_abs_ = 0.0;
  std::vector<Term> terms_;
  std::vector<Cut> cuts_;

  // Forward and backward log tables reused across MARG calls while the
  // scaling rows they depend on are unchanged.
  mutable std::mutex mu_;
  mutable double cache_eta_ = -1.0;
  mutable std::vector<Vec> fwd_rows_;
  mutable std::vector<Vec> fwd_;
  mutable int fwd_valid_ = 0;
  mutable std::vector<Vec> bwd_rows_;
  mutable std::vector<Vec> bwd_;
  mutable int bwd_valid_from_ = 0;
};

enum class LowRankBackend { kAuto, kLift, kQuantized };

struct LowRankOptions {
  LowRankBackend backend = LowRankBackend::kAuto;
  std::size_t rank_cap = kDefaultLiftRankCap;
  std::size_t state_cap = kDefaultStateCap;
};

struct LiftAudit {
  // max |L_j - exp(-eta R_j)| and the certified bound eps_tilde.
  double lift_error = 0.0;
  double eps_tilde = 0.0;
  // max |C~_j - C_j| and the allowed eps / 2.
  double cost_error = 0.0;
  double cost_budget = 0.0;
  std::size_t rank = 0;
  int degree = 0;
  std::size_t samples = 0;
};

// C = R + S. SMIN, MARG and AMIN are answered exactly for a nearby cost C~
// with max |C~ - C| <= eps / 2. The lift backend uses C~ = -log(L) / eta + S
// with L the polynomial lift of exp(-eta R); the quantized backend uses
// C~ = R~ + S. kAuto picks the lift when it certifies and falls back to the
// quantized product otherwise.
class LowRankPlusSparseCost {
 public:
  LowRankPlusSparseCost(LowRankFactors r, SparseComponent s,
                        LowRankOptions options = {});

  int n() const { return r_.n; }
  int k() const { return r_.k; }
  double cmax() const { return cmax_; }
  const LowRankFactors& factors() const { return r_; }
  const SparseComponent& sparse() const { return s_; }
  double evaluate(const Tuple& t) const;

  // SMIN of C~ at accuracy eps.
  double smin(const DualWeights& p, double eta, double eps) const;
  Vec log_marg(const std::vector<Vec>& log_d, double eta, int i,
               double eps) const;
  // SMIN at eta = 2 k log n / eps.
  double amin(const DualWeights& p, double eps) const;
  // Explicit C~ entry for the backend chosen at (eta, eps).
  double ctilde(const Tuple& t, double eta, double eps) const;
  // Whether (eta, eps) is served by the polynomial lift.
  bool uses_lift(double eta, double eps) const;
  // Sampled certification of the lift at (eta, eps). Throws when the lift is
  // unavailable there.
  LiftAudit audit_lift(double eta, double eps, std::size_t samples,
                       std::uint64_t seed) const;
  // Quantized product with budget eps_b (cached).
  std::shared_ptr<const QuantizedProduct> quantized(double eps_b) const;
  // SMIN and MARG of R~ + S for the quantized product with budget eps_b.
  double quantized_smin(const DualWeights& p, double eta, double eps_b) const;
  Vec quantized_log_marg(const std::vector<Vec>& log_d, double eta, int i,
                         double eps_b) const;
  // S_j, or 0 when j is not listed.
  double sparse_value(const Tuple& t) const;
  // Tuples of S in lexicographic order.
  const std::vector<Tuple>& sparse_tuples() const { return sparse_tuples_; }

 private:
  struct Lift {
    PolyCoeffs q;
    LowRankFactors l;
  };
  // Returns nullptr when the lift cannot be certified at (eta, eps).
  std::shared_ptr<const Lift> lift(double eta, double eps) const;
  // log of the scaled sum over L, and per-coordinate marginals.
  double lift_log_partition(const Lift& lf, const std::vector<Vec>& log_d) const;
  Vec lift_log_marg(const Lift& lf, const std::vector<Vec>& log_d, int i) const;
  // Log-sum over C~ = base + S given log_base, the log-sum without S, and
  // for each S tuple its log term without S and the log reweighting.
  // exact_outside returns the log-mass outside S computed without
  // subtraction; it is called only when the subtraction cancels.
  double combine_sparse(double log_base, const Vec& log_terms,
                        const Vec& factors,
                        const std::function<double()>& exact_outside) const;
  // Tiles the tuples outside S with cylinders: a fixed prefix and free
  // remaining coordinates.
  void build_cylinders(std::size_t lo, std::size_t hi, const Tuple& prefix);
  // log_d with the coordinates of `prefix` restricted to its values.
  std::vector<Vec> masked_rows(const std::vector<Vec>& log_d,
                               const Tuple& prefix) const;
  double outside_log_partition(
      const std::function<double(const std::vector<Vec>&)>& log_part,
      const std::vector<Vec>& log_d) const;
  Vec outside_log_marg(
      const std::function<Vec(const std::vector<Vec>&)>& log_marg_fn,
      const std::vector<Vec>& log_d) const;

  // Evaluates the lifted factors at a tuple.
  static double lift_value(const Lift& lf, const Tuple& t);

  LowRankFactors r_;
  SparseComponent s_;
  std::vector<Tuple> sparse_tuples_;
  std::vector<Tuple> cylinders_;
  LowRankOptions options_;
  double cmax_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<double, double>, std::shared_ptr<const Lift>> lifts_;
  mutable std::map<std::pair<double, double>, bool> lift_failed_;
  mutable std::map<double, std::shared_ptr<const QuantizedProduct>> quantized_;
};

// SMIN and AMIN of C = R + S per the class above.
double lr_smin(const LowRankPlusSparseCost& c, const DualWeights& p, double eta,
               double eps);
double lr_amin(const LowRankPlusSparseCost& c, const DualWeights& p, double eps);

// StructuredCost with SMIN and MARG on C~ at accuracy eps, AMIN (and derived
// ARGAMIN) via lr_amin, and eval returning the true C.
StructuredCost make_lowrank_cost(std::shared_ptr<const LowRankPlusSparseCost> c,
                                 double eps);

// StructuredCost for the quantized cost C~ = R~ + S with budget eps_b,
// exposing exact MIN, ARGMIN, SMIN and MARG of C~. Its eval returns C~.
StructuredCost quantized_view(std::shared_ptr<const LowRankPlusSparseCost> c,
                              double eps_b);

}  // namespace motkit

#endif  // MOTKIT_LOWRANK_H_
