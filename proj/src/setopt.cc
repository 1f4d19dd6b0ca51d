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

#include "motkit/setopt.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace motkit {

namespace {

void check_shape(const SetOracle& s, const DualWeights& p) {
  if (p.n() != s.n || p.k() != s.k) {
    throw InvalidArgument("setopt: weight dimensions do not match");
  }
}

// -sum_i max_j p_i[j], the unconstrained minimum of -sum_i p_i[j_i].
double free_minimum(const DualWeights& p) {
  double x = 0.0;
  for (int i = 0; i < p.k(); ++i) {
    x -= *std::max_element(p[i].begin(), p[i].end());
  }
  return x;
}

}  // namespace

double setopt_combine_min(double a, const DualWeights& p) {
  const double x = free_minimum(p);
  if (a <= x) return a;
  return std::min(a, 1.0 + x);
}

double setopt_min(const SetOracle& s, const DualWeights& p) {
  if (!s.min) throw CapabilityError("setopt: MIN set oracle unavailable");
  check_shape(s, p);
  return setopt_combine_min(s.min(p), p);
}

double setopt_amin(const SetOracle& s, const DualWeights& p, double eps) {
  if (!s.amin) throw CapabilityError("setopt: AMIN set oracle unavailable");
  check_shape(s, p);
  if (!(eps > 0)) throw InvalidArgument("setopt_amin: eps must be > 0");
  return setopt_combine_min(s.amin(p, eps), p);
}

double setopt_smin(const SetOracle& s, const DualWeights& p, double eta) {
  if (!s.smin) throw CapabilityError("setopt: SMIN set oracle unavailable");
  check_shape(s, p);
  if (!(eta > 0)) throw InvalidArgument("setopt_smin: eta must be > 0");
  // log x = sum_i logsumexp(eta p_i).
  double log_x = 0.0;
  for (int i = 0; i < p.k(); ++i) {
    Vec scaled(p[i].size());
    for (std::size_t j = 0; j < scaled.size(); ++j) scaled[j] = eta * p[i][j];
    log_x += log_sum_exp(scaled);
  }
  if (log_x == -kInf) return kInf;
  const double smin_s = s.smin(p, eta);
  const double log_a = smin_s == kInf ? -kInf : -eta * smin_s;
  const double terms[2] = {-eta + log_x, std::log(-std::expm1(-eta)) + log_a};
  return -log_sum_exp(terms) / eta;
}

StructuredCost make_setopt_cost(SetOracle s) {
  if (s.n < 1 || s.k < 1) throw InvalidArgument("setopt: n and k must be >= 1");
  StructuredCost sc(s.n, s.k, 1.0, "setopt");
  auto shared = std::make_shared<const SetOracle>(std::move(s));
  if (shared->min) {
    sc.set_min([shared](const DualWeights& p) { return setopt_min(*shared, p); });
  }
  if (shared->amin) {
    sc.set_amin([shared](const DualWeights& p, double eps) {
      return setopt_amin(*shared, p, eps);
    });
  }
  if (shared->smin) {
    sc.set_smin([shared](const DualWeights& p, double eta) {
      return setopt_smin(*shared, p, eta);
    });
  }
  if (shared->contains) {
    sc.set_eval([shared](const Tuple& t) {
      return shared->contains(t) ? 0.0 : 1.0;
    });
  }
  return complete_oracles(sc);
}

SetOracle make_explicit_set_oracle(int n, int k, std::vector<Tuple> members) {
  for (const Tuple& t : members) {
    if (static_cast<int>(t.size()) != k) {
      throw InvalidArgument("explicit set: tuple has wrong length");
    }
    for (int j : t) {
      if (j < 0 || j >= n) throw InvalidArgument("explicit set: entry out of range");
    }
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  auto list = std::make_shared<const std::vector<Tuple>>(std::move(members));
  auto lookup = std::make_shared<const std::unordered_set<Tuple, TupleHash>>(
      list->begin(), list->end());
  SetOracle s;
  s.n = n;
  s.k = k;
  s.min = [list](const DualWeights& p) {
    double best = kInf;
    for (const Tuple& t : *list) best = std::min(best, -p.sum_at(t));
    return best;
  };
  s.amin = [list](const DualWeights& p, double) {
    double best = kInf;
    for (const Tuple& t : *list) best = std::min(best, -p.sum_at(t));
    return best;
  };
  s.smin = [list](const DualWeights& p, double eta) {
    Vec values;
    values.reserve(list->size());
    for (const Tuple& t : *list) {
      const double w = p.sum_at(t);
      values.push_back(w == -kInf ? kInf : -w);
    }
    if (values.empty()) return kInf;
    return softmin(values, eta);
  };
  s.contains = [lookup](const Tuple& t) { return lookup->count(t) > 0; };
  return s;
}

}  // namespace motkit
