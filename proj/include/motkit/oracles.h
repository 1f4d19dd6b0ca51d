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

#ifndef MOTKIT_ORACLES_H_
#define MOTKIT_ORACLES_H_

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "motkit/core.h"

namespace motkit {

struct OracleAnswerArg {
  Tuple tuple;
  double value = 0.0;
};

// Relative tolerance under which two objective values count as tied; ties
// go to the lexicographically smallest tuple.
inline constexpr double kTieRelTol = 1e-10;

enum class Oracle { kMin, kArgMin, kAMin, kArgAMin, kSMin, kMarg };

std::string oracle_name(Oracle o);

// A cost tensor C over [n]^k exposed only through oracles. Each handle is
// optional. The MARG handle works in the log domain: it receives log d_i and
// returns log of the i-th marginal of (outer d) .* exp(-eta C), which keeps
// large eta usable.
class StructuredCost {
 public:
  using MinFn = std::function<double(const DualWeights&)>;
  using ArgMinFn = std::function<OracleAnswerArg(const DualWeights&)>;
  using AMinFn = std::function<double(const DualWeights&, double eps)>;
  using ArgAMinFn =
      std::function<OracleAnswerArg(const DualWeights&, double eps)>;
  using SMinFn = std::function<double(const DualWeights&, double eta)>;
  using LogMargFn =
      std::function<Vec(const std::vector<Vec>& log_d, double eta, int i)>;
  using EvalFn = std::function<double(const Tuple&)>;

  StructuredCost(int n, int k, double cmax, std::string name = "cost");

  int n() const { return n_; }
  int k() const { return k_; }
  double cmax() const { return cmax_; }
  const std::string& name() const { return name_; }

  StructuredCost& set_min(MinFn f);
  StructuredCost& set_argmin(ArgMinFn f);
  StructuredCost& set_amin(AMinFn f);
  StructuredCost& set_argamin(ArgAMinFn f);
  StructuredCost& set_smin(SMinFn f);
  StructuredCost& set_log_marg(LogMargFn f);
  // Direct evaluation of C at a tuple. Not an oracle of the model; engines
  // use it to report the cost of the plans they return. `matches_oracles`
  // is false when the oracles answer for a nearby approximate cost, in which
  // case eval returns the true cost and engines must not mix the two.
  StructuredCost& set_eval(EvalFn f, bool matches_oracles = true);

  bool supports(Oracle o) const;
  bool has_eval() const { return static_cast<bool>(eval_); }
  bool eval_matches_oracles() const { return eval_matches_oracles_; }
  std::vector<Oracle> capabilities() const;

  double min(const DualWeights& p) const;
  OracleAnswerArg argmin(const DualWeights& p) const;
  double amin(const DualWeights& p, double eps) const;
  OracleAnswerArg argamin(const DualWeights& p, double eps) const;
  double smin(const DualWeights& p, double eta) const;
  Vec log_marg(const std::vector<Vec>& log_d, double eta, int i) const;
  // Linear-domain MARG: d_i >= 0 entrywise.
  Vec marg(const std::vector<Vec>& d, double eta, int i) const;
  double eval(const Tuple& t) const;

  long oracle_calls() const { return calls_->load(); }
  void reset_oracle_calls() const { calls_->store(0); }

 private:
  void require(bool present, Oracle o) const;
  void check_weights(const DualWeights& p) const;
  void count() const { calls_->fetch_add(1, std::memory_order_relaxed); }

  int n_;
  int k_;
  double cmax_;
  std::string name_;
  MinFn min_;
  ArgMinFn argmin_;
  AMinFn amin_;
  ArgAMinFn argamin_;
  SMinFn smin_;
  LogMargFn log_marg_;
  EvalFn eval_;
  bool eval_matches_oracles_ = true;
  std::shared_ptr<std::atomic<long>> calls_;
};

// Masked copy of row s: value p_s[j] at j and -big elsewhere.
Vec masked_row(const Vec& row, int j, double big);

// Exact dense backends.
double min_dense(const DenseTensor& t, const DualWeights& p);
// Lexicographically smallest minimizer (ties within kTieRelTol).
OracleAnswerArg argmin_dense(const DenseTensor& t, const DualWeights& p);
double smin_dense(const DenseTensor& t, const DualWeights& p, double eta);
Vec log_marg_dense(const DenseTensor& t, const std::vector<Vec>& log_d,
                   double eta, int i);
StructuredCost make_dense_cost(const DenseTensor& t);

// Generic reductions between oracles.
OracleAnswerArg argmin_from_min(const StructuredCost& sc, const DualWeights& p);
OracleAnswerArg argamin_from_amin(const StructuredCost& sc,
                                  const DualWeights& p, double eps);
double smin_from_marg(const StructuredCost& sc, const DualWeights& p,
                      double eta);
// Linear-domain form: d_i >= 0.
Vec marg_from_smin(const StructuredCost& sc, const std::vector<Vec>& d,
                   double eta, int i);
// Log-domain form used by the engines.
Vec log_marg_from_smin(const StructuredCost& sc, const std::vector<Vec>& log_d,
                       double eta, int i);
double amin_from_smin(const StructuredCost& sc, const DualWeights& p,
                      double eps);
double amin_from_min(const StructuredCost& sc, const DualWeights& p,
                     double eps);

// Returns a copy of `sc` in which every oracle derivable from the supported
// ones is filled in through the reductions above. SMIN is never derived from
// MIN, so a cost without SMIN or MARG stays unusable by SINKHORN.
StructuredCost complete_oracles(const StructuredCost& sc);

}  // namespace motkit

#endif  // MOTKIT_ORACLES_H_
