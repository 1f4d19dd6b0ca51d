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

#include "motkit/oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace motkit {

namespace {

constexpr double kUnbounded = std::numeric_limits<double>::max();

DualWeights unchecked_weights(std::vector<Vec> rows) {
  return DualWeights(std::move(rows), kUnbounded);
}

bool within_tie(double v, double best) {
  return v <= best + kTieRelTol * (1.0 + std::abs(best));
}

}  // namespace

std::string oracle_name(Oracle o) {
  switch (o) {
    case Oracle::kMin:
      return "MIN";
    case Oracle::kArgMin:
      return "ARGMIN";
    case Oracle::kAMin:
      return "AMIN";
    case Oracle::kArgAMin:
      return "ARGAMIN";
    case Oracle::kSMin:
      return "SMIN";
    case Oracle::kMarg:
      return "MARG";
  }
  return "?";
}

StructuredCost::StructuredCost(int n, int k, double cmax, std::string name)
    : n_(n),
      k_(k),
      cmax_(cmax),
      name_(std::move(name)),
      calls_(std::make_shared<std::atomic<long>>(0)) {
  if (n < 1 || k < 1) throw InvalidArgument("cost: n and k must be >= 1");
  if (!(cmax >= 0) || !std::isfinite(cmax)) {
    throw InvalidArgument("cost: cmax must be finite and >= 0");
  }
}

StructuredCost& StructuredCost::set_min(MinFn f) {
  min_ = std::move(f);
  return *this;
}
StructuredCost& StructuredCost::set_argmin(ArgMinFn f) {
  argmin_ = std::move(f);
  return *this;
}
StructuredCost& StructuredCost::set_amin(AMinFn f) {
  amin_ = std::move(f);
  return *this;
}
StructuredCost& StructuredCost::set_argamin(ArgAMinFn f) {
  argamin_ = std::move(f);
  return *this;
}
StructuredCost& StructuredCost::set_smin(SMinFn f) {
  smin_ = std::move(f);
  return *this;
}
StructuredCost& StructuredCost::set_log_marg(LogMargFn f) {
  log_marg_ = std::move(f);
  return *this;
}
StructuredCost& StructuredCost::set_eval(EvalFn f, bool matches_oracles) {
  eval_ = std::move(f);
  eval_matches_oracles_ = matches_oracles;
  return *this;
}

bool StructuredCost::supports(Oracle o) const {
  switch (o) {
    case Oracle::kMin:
      return static_cast<bool>(min_);
    case Oracle::kArgMin:
      return static_cast<bool>(argmin_);
    case Oracle::kAMin:
      return static_cast<bool>(amin_);
    case Oracle::kArgAMin:
      return static_cast<bool>(argamin_);
    case Oracle::kSMin:
      return static_cast<bool>(smin_);
    case Oracle::kMarg:
      return static_cast<bool>(log_marg_);
  }
  return false;
}

std::vector<Oracle> StructuredCost::capabilities() const {
  std::vector<Oracle> out;
  for (Oracle o : {Oracle::kMin, Oracle::kArgMin, Oracle::kAMin,
                   Oracle::kArgAMin, Oracle::kSMin, Oracle::kMarg}) {
    if (supports(o)) out.push_back(o);
  }
  return out;
}

void StructuredCost::require(bool present, Oracle o) const {
  if (!present) {
    throw CapabilityError(name_ + ": " + oracle_name(o) +
                          " oracle unavailable");
  }
}

void StructuredCost::check_weights(const DualWeights& p) const {
  if (p.n() != n_ || p.k() != k_) {
    throw InvalidArgument(name_ + ": weight dimensions do not match the cost");
  }
}

double StructuredCost::min(const DualWeights& p) const {
  require(static_cast<bool>(min_), Oracle::kMin);
  check_weights(p);
  count();
  return min_(p);
}

OracleAnswerArg StructuredCost::argmin(const DualWeights& p) const {
  require(static_cast<bool>(argmin_), Oracle::kArgMin);
  check_weights(p);
  count();
  return argmin_(p);
}

double StructuredCost::amin(const DualWeights& p, double eps) const {
  require(static_cast<bool>(amin_), Oracle::kAMin);
  check_weights(p);
  if (!(eps > 0)) throw InvalidArgument("AMIN: eps must be positive");
  count();
  return amin_(p, eps);
}

OracleAnswerArg StructuredCost::argamin(const DualWeights& p,
                                        double eps) const {
  require(static_cast<bool>(argamin_), Oracle::kArgAMin);
  check_weights(p);
  if (!(eps > 0)) throw InvalidArgument("ARGAMIN: eps must be positive");
  count();
  return argamin_(p, eps);
}

double StructuredCost::smin(const DualWeights& p, double eta) const {
  require(static_cast<bool>(smin_), Oracle::kSMin);
  check_weights(p);
  if (!(eta > 0)) throw InvalidArgument("SMIN: eta must be positive");
  count();
  return smin_(p, eta);
}

Vec StructuredCost::log_marg(const std::vector<Vec>& log_d, double eta,
                             int i) const {
  require(static_cast<bool>(log_marg_), Oracle::kMarg);
  if (static_cast<int>(log_d.size()) != k_) {
    throw InvalidArgument(name_ + ": MARG needs k scaling vectors");
  }
  for (const Vec& v : log_d) {
    if (static_cast<int>(v.size()) != n_) {
      throw InvalidArgument(name_ + ": scaling vector has wrong length");
    }
  }
  if (i < 0 || i >= k_) throw InvalidArgument("MARG: marginal index out of range");
  if (!(eta > 0)) throw InvalidArgument("MARG: eta must be positive");
  count();
  Vec out = log_marg_(log_d, eta, i);
  for (double v : out) {
    if (std::isnan(v)) throw OracleViolation(name_ + ": MARG returned NaN");
  }
  return out;
}

Vec StructuredCost::marg(const std::vector<Vec>& d, double eta, int i) const {
  std::vector<Vec> log_d(d.size());
  for (std::size_t s = 0; s < d.size(); ++s) {
    log_d[s].resize(d[s].size());
    for (std::size_t j = 0; j < d[s].size(); ++j) {
      if (!(d[s][j] >= 0)) {
        throw InvalidArgument("MARG: scaling vectors must be nonnegative");
      }
      log_d[s][j] = std::log(d[s][j]);
    }
  }
  Vec out = log_marg(log_d, eta, i);
  for (double& v : out) v = std::exp(v);
  return out;
}

double StructuredCost::eval(const Tuple& t) const {
  if (!eval_) throw CapabilityError(name_ + ": direct evaluation unavailable");
  return eval_(t);
}

Vec masked_row(const Vec& row, int j, double big) {
  Vec out(row.size(), -big);
  out[j] = row[j];
  return out;
}

namespace {

// Visits every tuple with its row-major index and sum_i p_i[j_i].
template <typename Fn>
void for_each_weighted(const DenseTensor& t, const std::vector<Vec>& p,
                       Fn&& fn) {
  const int n = t.n();
  const int k = t.k();
  Tuple j(k, 0);
  // prefix[i] = sum of p over coordinates < i.
  Vec prefix(k + 1, 0.0);
  for (int i = 0; i < k; ++i) prefix[i + 1] = prefix[i] + p[i][0];
  std::size_t idx = 0;
  while (true) {
    fn(idx, j, prefix[k]);
    ++idx;
    int i = k - 1;
    while (i >= 0 && j[i] == n - 1) {
      j[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++j[i];
    for (int s = i; s < k; ++s) prefix[s + 1] = prefix[s] + p[s][j[s]];
  }
}

void check_dims(const DenseTensor& t, const DualWeights& p) {
  if (t.n() != p.n() || t.k() != p.k()) {
    throw InvalidArgument("dense oracle: weight dimensions do not match");
  }
}

}  // namespace

double min_dense(const DenseTensor& t, const DualWeights& p) {
  check_dims(t, p);
  double best = kInf;
  const Vec& c = t.values();
  for_each_weighted(t, p.rows(), [&](std::size_t idx, const Tuple&, double s) {
    best = std::min(best, c[idx] - s);
  });
  return best;
}

OracleAnswerArg argmin_dense(const DenseTensor& t, const DualWeights& p) {
  check_dims(t, p);
  const double best = min_dense(t, p);
  OracleAnswerArg ans;
  bool found = false;
  const Vec& c = t.values();
  for_each_weighted(t, p.rows(), [&](std::size_t idx, const Tuple& j, double s) {
    if (found) return;
    const double v = c[idx] - s;
    if (within_tie(v, best)) {
      ans.tuple = j;
      ans.value = v;
      found = true;
    }
  });
  return ans;
}

double smin_dense(const DenseTensor& t, const DualWeights& p, double eta) {
  check_dims(t, p);
  if (!(eta > 0)) throw InvalidArgument("smin_dense: eta must be positive");
  LogSumAccumulator acc;
  const Vec& c = t.values();
  for_each_weighted(t, p.rows(), [&](std::size_t idx, const Tuple&, double s) {
    acc.add(-eta * (c[idx] - s));
  });
  const double lz = acc.value();
  return lz == -kInf ? kInf : -lz / eta;
}

Vec log_marg_dense(const DenseTensor& t, const std::vector<Vec>& log_d,
                   double eta, int i) {
  std::vector<LogSumAccumulator> acc(t.n());
  const Vec& c = t.values();
  for_each_weighted(t, log_d, [&](std::size_t idx, const Tuple& j, double s) {
    acc[j[i]].add(s - eta * c[idx]);
  });
  Vec out(t.n());
  for (int a = 0; a < t.n(); ++a) out[a] = acc[a].value();
  return out;
}

StructuredCost make_dense_cost(const DenseTensor& t) {
  auto tensor = std::make_shared<const DenseTensor>(t);
  StructuredCost sc(t.n(), t.k(), t.max_abs(), "dense");
  sc.set_min([tensor](const DualWeights& p) { return min_dense(*tensor, p); })
      .set_argmin([tensor](const DualWeights& p) {
        return argmin_dense(*tensor, p);
      })
      .set_smin([tensor](const DualWeights& p, double eta) {
        return smin_dense(*tensor, p, eta);
      })
      .set_log_marg([tensor](const std::vector<Vec>& log_d, double eta, int i) {
        return log_marg_dense(*tensor, log_d, eta, i);
      })
      .set_eval([tensor](const Tuple& j) { return tensor->at(j); });
  return sc;
}

namespace {

double mask_constant(const StructuredCost& sc, const DualWeights& p) {
  double s = 0.0;
  for (int i = 0; i < p.k(); ++i) s += p.row_max_abs(i);
  return 2.0 * sc.cmax() + 2.0 * s + 1.0;
}

// Coordinate-by-coordinate fixing shared by the exact and approximate
// reductions. `oracle` evaluates the (approximate) min of masked weights and
// `slack` is how far a restricted answer may fall below the unrestricted one.
template <typename Fn>
OracleAnswerArg fix_coordinates(const StructuredCost& sc, const DualWeights& p,
                                Fn&& oracle, double slack) {
  const int n = sc.n();
  const int k = sc.k();
  // Weights that already contain -inf can only go to oracles that accept
  // -inf, so masking uses -inf too. Finite weights are masked with a finite
  // constant large enough to exclude the masked values.
  const bool finite = p.all_finite();
  const double big = finite ? mask_constant(sc, p) : kInf;
  const double base = oracle(p);
  OracleAnswerArg ans;
  ans.tuple.assign(k, 0);
  if (base == kInf) {
    ans.value = kInf;
    return ans;
  }
  std::vector<Vec> rows = p.rows();
  for (int s = 0; s < k; ++s) {
    Vec vals(n, kInf);
    double best = kInf;
    for (int j = 0; j < n; ++j) {
      if (rows[s][j] == -kInf) continue;
      std::vector<Vec> q = rows;
      q[s] = masked_row(p[s], j, big);
      vals[j] = oracle(unchecked_weights(std::move(q)));
      best = std::min(best, vals[j]);
    }
    int pick = 0;
    while (!within_tie(vals[pick], best)) ++pick;
    const double tol = 1e-6 * (1.0 + std::abs(base));
    if (best < base - slack - tol) {
      throw OracleViolation(sc.name() +
                            ": restricted minimum below the unrestricted one");
    }
    // With exact answers some restriction must attain the minimum.
    if (slack == 0.0 && best > base + tol) {
      throw OracleViolation(sc.name() +
                            ": no restriction attains the unrestricted minimum");
    }
    ans.tuple[s] = pick;
    ans.value = vals[pick];
    rows[s] = masked_row(p[s], pick, big);
  }
  return ans;
}

}  // namespace

OracleAnswerArg argmin_from_min(const StructuredCost& sc,
                                const DualWeights& p) {
  return fix_coordinates(
      sc, p, [&](const DualWeights& q) { return sc.min(q); }, 0.0);
}

OracleAnswerArg argamin_from_amin(const StructuredCost& sc,
                                  const DualWeights& p, double eps) {
  if (!(eps > 0)) throw InvalidArgument("argamin_from_amin: eps must be > 0");
  const double inner = eps / (2.0 * sc.k());
  return fix_coordinates(
      sc, p, [&](const DualWeights& q) { return sc.amin(q, inner); },
      2.0 * inner);
}

double smin_from_marg(const StructuredCost& sc, const DualWeights& p,
                      double eta) {
  std::vector<Vec> log_d = p.rows();
  for (Vec& row : log_d) {
    for (double& v : row) v *= eta;
  }
  const Vec lm = sc.log_marg(log_d, eta, 0);
  const double lz = log_sum_exp(lm);
  return lz == -kInf ? kInf : -lz / eta;
}

Vec log_marg_from_smin(const StructuredCost& sc, const std::vector<Vec>& log_d,
                       double eta, int i) {
  std::vector<Vec> p = log_d;
  for (Vec& row : p) {
    for (double& v : row) v /= eta;
  }
  Vec out(sc.n());
  for (int l = 0; l < sc.n(); ++l) {
    std::vector<Vec> q = p;
    q[i] = masked_row(p[i], l, kInf);
    const double s = sc.smin(unchecked_weights(std::move(q)), eta);
    out[l] = s == kInf ? -kInf : -eta * s;
  }
  return out;
}

Vec marg_from_smin(const StructuredCost& sc, const std::vector<Vec>& d,
                   double eta, int i) {
  std::vector<Vec> log_d = d;
  for (Vec& row : log_d) {
    for (double& v : row) {
      if (!(v >= 0)) {
        throw InvalidArgument("marg_from_smin: scaling vectors must be >= 0");
      }
      v = std::log(v);
    }
  }
  Vec out = log_marg_from_smin(sc, log_d, eta, i);
  for (double& v : out) v = std::exp(v);
  return out;
}

double amin_from_smin(const StructuredCost& sc, const DualWeights& p,
                      double eps) {
  if (!(eps > 0)) throw InvalidArgument("amin_from_smin: eps must be > 0");
  if (sc.n() == 1) return sc.smin(p, 1.0);
  const double eta = sc.k() * std::log(static_cast<double>(sc.n())) / eps;
  return sc.smin(p, eta);
}

double amin_from_min(const StructuredCost& sc, const DualWeights& p,
                     double /*eps*/) {
  return sc.min(p);
}

StructuredCost complete_oracles(const StructuredCost& sc) {
  // Each stage captures an immutable snapshot of the previous one.
  auto s0 = std::make_shared<const StructuredCost>(sc);
  StructuredCost s1 = sc;
  if (!s1.supports(Oracle::kSMin) && s1.supports(Oracle::kMarg)) {
    s1.set_smin([s0](const DualWeights& p, double eta) {
      return smin_from_marg(*s0, p, eta);
    });
  }
  if (!s1.supports(Oracle::kMarg) && s1.supports(Oracle::kSMin)) {
    s1.set_log_marg(
        [s0](const std::vector<Vec>& log_d, double eta, int i) {
          return log_marg_from_smin(*s0, log_d, eta, i);
        });
  }
  auto p1 = std::make_shared<const StructuredCost>(s1);
  StructuredCost s2 = s1;
  if (!s2.supports(Oracle::kMin) && s2.supports(Oracle::kArgMin)) {
    s2.set_min([p1](const DualWeights& p) { return p1->argmin(p).value; });
  }
  if (!s2.supports(Oracle::kArgMin) && s2.supports(Oracle::kMin)) {
    s2.set_argmin(
        [p1](const DualWeights& p) { return argmin_from_min(*p1, p); });
  }
  auto p2 = std::make_shared<const StructuredCost>(s2);
  StructuredCost s3 = s2;
  if (!s3.supports(Oracle::kAMin)) {
    if (s3.supports(Oracle::kMin)) {
      s3.set_amin([p2](const DualWeights& p, double eps) {
        return amin_from_min(*p2, p, eps);
      });
    } else if (s3.supports(Oracle::kArgAMin)) {
      s3.set_amin([p2](const DualWeights& p, double eps) {
        return p2->argamin(p, eps).value;
      });
    } else if (s3.supports(Oracle::kSMin)) {
      s3.set_amin([p2](const DualWeights& p, double eps) {
        return amin_from_smin(*p2, p, eps);
      });
    }
  }
  auto p3 = std::make_shared<const StructuredCost>(s3);
  StructuredCost s4 = s3;
  if (!s4.supports(Oracle::kArgAMin)) {
    if (s4.supports(Oracle::kArgMin)) {
      s4.set_argamin([p3](const DualWeights& p, double) {
        return p3->argmin(p);
      });
    } else if (s4.supports(Oracle::kAMin)) {
      s4.set_argamin([p3](const DualWeights& p, double eps) {
        return argamin_from_amin(*p3, p, eps);
      });
    }
  }
  return s4;
}

}  // namespace motkit
