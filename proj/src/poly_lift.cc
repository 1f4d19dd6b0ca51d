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
#include <cmath>
#include <numbers>
#include <string>

#include "motkit/lowrank.h"

namespace motkit {

namespace {

constexpr int kMaxDegree = 120;
constexpr int kAuditGridPoints = 10000;
// Stop growing the degree once the grid error has not improved for this many
// consecutive degrees.
constexpr int kStallDegrees = 12;

void check_vector(const Vec& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n) {
    throw InvalidArgument(std::string(what) + ": factor vector must have n entries");
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw InvalidArgument(std::string(what) + ": factor entries must be finite");
    }
  }
}

double binomial(int a, int b) {
  double r = 1.0;
  for (int t = 1; t <= b; ++t) r = r * (a - b + t) / t;
  return r;
}

}  // namespace

double LowRankFactors::evaluate(const Tuple& t) const {
  if (static_cast<int>(t.size()) != k) {
    throw InvalidArgument("low-rank: tuple has wrong length");
  }
  double total = 0.0;
  for (const auto& term : u) {
    double prod = 1.0;
    for (int i = 0; i < k; ++i) prod *= term[i][t[i]];
    total += prod;
  }
  return total;
}

LowRankFactors make_lowrank_factors(int n, int k,
                                    std::vector<std::vector<Vec>> u,
                                    double rmax) {
  if (n < 1 || k < 1) throw InvalidArgument("low-rank: n and k must be >= 1");
  if (u.empty()) throw InvalidArgument("low-rank: rank must be >= 1");
  double bound = 0.0;
  for (const auto& term : u) {
    if (static_cast<int>(term.size()) != k) {
      throw InvalidArgument("low-rank: each term needs k factor vectors");
    }
    double prod = 1.0;
    for (const Vec& v : term) {
      check_vector(v, n, "low-rank");
      double m = 0.0;
      for (double x : v) m = std::max(m, std::abs(x));
      prod *= m;
    }
    bound += prod;
  }
  LowRankFactors f;
  f.n = n;
  f.k = k;
  f.u = std::move(u);
  if (rmax < 0) {
    f.rmax = bound;
  } else {
    if (!std::isfinite(rmax)) throw InvalidArgument("low-rank: rmax must be finite");
    f.rmax = rmax;
  }
  return f;
}

void validate_sparse(const SparseComponent& s, int n, int k, std::size_t cap) {
  if (s.entries.size() > cap) {
    throw CapExceeded("sparse component: " + std::to_string(s.entries.size()) +
                      " entries exceed the cap " + std::to_string(cap));
  }
  std::vector<Tuple> seen;
  for (const SparseEntry& e : s.entries) {
    if (static_cast<int>(e.index.size()) != k) {
      throw InvalidArgument("sparse component: tuple has wrong length");
    }
    for (int j : e.index) {
      if (j < 0 || j >= n) throw InvalidArgument("sparse component: entry out of range");
    }
    if (!std::isfinite(e.value)) throw InvalidArgument("sparse component: value not finite");
    seen.push_back(e.index);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw InvalidArgument("sparse component: duplicate tuple");
  }
}

double PolyCoeffs::operator()(double x) const {
  double v = 0.0;
  for (int m = degree; m >= 0; --m) v = v * x + a[m];
  return v;
}

PolyCoeffs poly_approx_exp(double eta, double rmax, double eps_tilde) {
  if (!(eta > 0) || !std::isfinite(eta)) {
    throw InvalidArgument("poly_approx_exp: eta must be positive and finite");
  }
  if (!(rmax >= 0) || !std::isfinite(rmax)) {
    throw InvalidArgument("poly_approx_exp: rmax must be finite and >= 0");
  }
  if (eta * rmax > kMaxLiftExponent) {
    throw PrecisionError("poly_approx_exp: eta * rmax = " +
                         std::to_string(eta * rmax) +
                         " exceeds the double-precision envelope");
  }
  if (!(eps_tilde > 0) || eps_tilde >= std::exp(-eta * rmax)) {
    throw InvalidArgument("poly_approx_exp: eps_tilde must lie in (0, exp(-eta rmax))");
  }
  PolyCoeffs q;
  q.eta = eta;
  q.rmax = rmax;
  if (rmax == 0.0) {
    q.degree = 0;
    q.a = {1.0};
    return q;
  }
  const double target = eps_tilde / 2.0;
  double best_err = kInf;
  int stall = 0;
  // Monomial coefficients of T_0, T_1, ... in the variable y = x / rmax.
  std::vector<Vec> cheb = {{1.0}, {0.0, 1.0}};
  for (int m = 0; m <= kMaxDegree; ++m) {
    while (static_cast<int>(cheb.size()) <= m) {
      const Vec& t1 = cheb[cheb.size() - 1];
      const Vec& t0 = cheb[cheb.size() - 2];
      Vec next(t1.size() + 1, 0.0);
      for (std::size_t e = 0; e < t1.size(); ++e) next[e + 1] += 2.0 * t1[e];
      for (std::size_t e = 0; e < t0.size(); ++e) next[e] -= t0[e];
      cheb.push_back(std::move(next));
    }
    const int nodes = m + 1;
    Vec fx(nodes);
    for (int s = 0; s < nodes; ++s) {
      const double y = std::cos(std::numbers::pi * (s + 0.5) / nodes);
      fx[s] = std::exp(-eta * rmax * y);
    }
    Vec y_coef(m + 1, 0.0);
    for (int d = 0; d <= m; ++d) {
      double c = 0.0;
      for (int s = 0; s < nodes; ++s) {
        c += fx[s] * std::cos(std::numbers::pi * d * (s + 0.5) / nodes);
      }
      c *= 2.0 / nodes;
      if (d == 0) c /= 2.0;
      for (std::size_t e = 0; e < cheb[d].size(); ++e) y_coef[e] += c * cheb[d][e];
    }
    PolyCoeffs cand = q;
    cand.degree = m;
    cand.a.resize(m + 1);
    double scale = 1.0;
    for (int e = 0; e <= m; ++e) {
      cand.a[e] = y_coef[e] / scale;
      scale *= rmax;
    }
    double err = 0.0;
    for (int g = 0; g < kAuditGridPoints; ++g) {
      const double x = -rmax + 2.0 * rmax * g / (kAuditGridPoints - 1);
      err = std::max(err, std::abs(std::exp(-eta * x) - cand(x)));
    }
    cand.certified_error = err;
    if (err <= target) return cand;
    if (err < best_err * (1.0 - 1e-3)) {
      best_err = err;
      stall = 0;
    } else if (++stall >= kStallDegrees) {
      break;
    }
  }
  throw PrecisionError("poly_approx_exp: grid error stalls at " +
                       std::to_string(best_err) + " above the target " +
                       std::to_string(target) + " in double precision");
}

LowRankFactors lift_lowrank_exp(const LowRankFactors& r, const PolyCoeffs& q,
                                std::size_t rank_cap) {
  const int rank = r.rank();
  const int m = q.degree;
  const double lifted_rank = binomial(rank + m, rank);
  if (lifted_rank > static_cast<double>(rank_cap)) {
    throw CapExceeded("lift_lowrank_exp: lifted rank " +
                      std::to_string(static_cast<long long>(lifted_rank)) +
                      " exceeds the cap " + std::to_string(rank_cap) +
                      "; lower the polynomial degree or the rank");
  }
  LowRankFactors l;
  l.n = r.n;
  l.k = r.k;
  double bound = 0.0;
  double rpow = 1.0;
  for (int e = 0; e <= m; ++e) {
    bound += std::abs(q.a[e]) * rpow;
    rpow *= r.rmax;
  }
  l.rmax = bound;

  // Enumerate alpha in N^rank with |alpha| <= m in lexicographic order.
  std::vector<int> alpha(rank, 0);
  while (true) {
    int total = 0;
    for (int a : alpha) total += a;
    if (total <= m) {
      double multinomial = std::tgamma(total + 1.0);
      for (int a : alpha) multinomial /= std::tgamma(a + 1.0);
      std::vector<Vec> term(r.k, Vec(r.n, 1.0));
      for (int i = 0; i < r.k; ++i) {
        for (int j = 0; j < r.n; ++j) {
          double prod = 1.0;
          for (int t = 0; t < rank; ++t) {
            for (int e = 0; e < alpha[t]; ++e) prod *= r.u[t][i][j];
          }
          term[i][j] = prod;
        }
      }
      for (int j = 0; j < r.n; ++j) term[0][j] *= multinomial * q.a[total];
      l.u.push_back(std::move(term));
    }
    int pos = rank - 1;
    while (pos >= 0) {
      if (++alpha[pos] <= m) break;
      alpha[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return l;
}

double marginalize_scaled_lowrank(const std::vector<Vec>& d,
                                  const LowRankFactors& l) {
  if (static_cast<int>(d.size()) != l.k) {
    throw InvalidArgument("marginalize_scaled_lowrank: need k scaling vectors");
  }
  for (const Vec& v : d) {
    if (static_cast<int>(v.size()) != l.n) {
      throw InvalidArgument("marginalize_scaled_lowrank: vector length must be n");
    }
  }
  // The terms carry signed polynomial coefficients and cancel; accumulate
  // in extended precision.
  long double total = 0.0L;
  for (const auto& term : l.u) {
    long double prod = 1.0L;
    for (int i = 0; i < l.k; ++i) {
      long double dot = 0.0L;
      for (int j = 0; j < l.n; ++j) dot += static_cast<long double>(d[i][j]) * term[i][j];
      prod *= dot;
    }
    total += prod;
  }
  return static_cast<double>(total);
}

}  // namespace motkit
