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

#include "motkit/graphical.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace motkit {

namespace {

constexpr std::uint64_t kMaxBagEntries = 50000000;

std::uint64_t ipow(int n, std::size_t e) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= static_cast<std::uint64_t>(n);
  return r;
}

// Value of the variable at position `pos` of a bag with `size` variables.
inline int entry_value(std::size_t idx, std::size_t pos, std::size_t size,
                       const std::vector<std::uint64_t>& pw, int n) {
  return static_cast<int>((idx / pw[size - 1 - pos]) % n);
}

}  // namespace

GraphicalCost::GraphicalCost(int n, int k, std::vector<Factor> factors,
                             int width_cap)
    : n_(n), k_(k), factors_(std::move(factors)) {
  if (n < 1 || k < 1) throw InvalidArgument("graphical: n and k must be >= 1");
  if (factors_.empty()) throw InvalidArgument("graphical: no factors");
  std::vector<std::vector<int>> scopes;
  cmax_ = 0.0;
  for (const Factor& f : factors_) {
    if (f.scope.empty()) throw InvalidArgument("graphical: empty factor scope");
    for (std::size_t t = 0; t < f.scope.size(); ++t) {
      if (f.scope[t] < 0 || f.scope[t] >= k) {
        throw InvalidArgument("graphical: scope variable out of range");
      }
      if (t > 0 && f.scope[t] <= f.scope[t - 1]) {
        throw InvalidArgument("graphical: scope must be sorted and unique");
      }
    }
    if (static_cast<int>(f.scope.size()) - 1 > width_cap) {
      throw TreewidthError("graphical: factor scope larger than the width cap");
    }
    if (f.table.size() != ipow(n, f.scope.size())) {
      throw InvalidArgument("graphical: factor table must have n^|scope| entries");
    }
    double m = 0.0;
    for (double v : f.table) {
      if (!std::isfinite(v)) throw InvalidArgument("graphical: table not finite");
      m = std::max(m, std::abs(v));
    }
    cmax_ += m;
    scopes.push_back(f.scope);
  }
  jt_ = build_junction_tree(scopes, k, width_cap);

  std::vector<std::uint64_t> pw(k + 2);
  pw[0] = 1;
  for (int e = 1; e < k + 2; ++e) pw[e] = pw[e - 1] * n;

  const int nb = static_cast<int>(jt_.bags.size());
  bags_.resize(nb);
  for (int b = 0; b < nb; ++b) {
    BagData& bd = bags_[b];
    bd.vars = jt_.bags[b];
    const std::size_t size = bd.vars.size();
    const std::uint64_t entries = ipow(n, size);
    if (entries > kMaxBagEntries) {
      throw TreewidthError("graphical: bag table with " +
                           std::to_string(entries) + " entries is too large");
    }
    bd.base.assign(entries, 0.0);
  }
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    BagData& bd = bags_[jt_.factor_bag[f]];
    const Factor& fac = factors_[f];
    std::vector<std::size_t> pos;
    for (int v : fac.scope) {
      pos.push_back(std::lower_bound(bd.vars.begin(), bd.vars.end(), v) -
                    bd.vars.begin());
    }
    const std::size_t size = bd.vars.size();
    for (std::size_t idx = 0; idx < bd.base.size(); ++idx) {
      std::size_t fi = 0;
      for (std::size_t p : pos) fi = fi * n + entry_value(idx, p, size, pw, n);
      bd.base[idx] += fac.table[fi];
    }
  }
  for (int v = 0; v < k; ++v) bags_[jt_.variable_bag[v]].unary_vars.push_back(v);
  for (auto [a, b] : jt_.edges) {
    bags_[a].nbrs.push_back(b);
    bags_[b].nbrs.push_back(a);
  }
  for (int b = 0; b < nb; ++b) {
    BagData& bd = bags_[b];
    const std::size_t size = bd.vars.size();
    for (int c : bd.nbrs) {
      std::vector<std::size_t> pos;
      for (std::size_t t = 0; t < size; ++t) {
        if (std::binary_search(jt_.bags[c].begin(), jt_.bags[c].end(),
                               bd.vars[t])) {
          pos.push_back(t);
        }
      }
      std::vector<std::uint32_t> map(bd.base.size());
      for (std::size_t idx = 0; idx < bd.base.size(); ++idx) {
        std::size_t si = 0;
        for (std::size_t p : pos) si = si * n + entry_value(idx, p, size, pw, n);
        map[idx] = static_cast<std::uint32_t>(si);
      }
      bd.sep_index.push_back(std::move(map));
      bd.sep_size.push_back(ipow(n, pos.size()));
    }
  }
}

double GraphicalCost::evaluate(const Tuple& t) const {
  if (static_cast<int>(t.size()) != k_) {
    throw InvalidArgument("graphical: tuple has wrong length");
  }
  double c = 0.0;
  for (const Factor& f : factors_) {
    std::size_t fi = 0;
    for (int v : f.scope) fi = fi * n_ + t[v];
    c += f.table[fi];
  }
  return c;
}

namespace {

enum class Semiring { kMinSum, kLogSum };

// One collect pass of message passing towards `root`. Tables live in a score
// domain: costs for min-sum, log-weights for log-sum. `unary[v][a]` is added
// at the bag carrying v, `scale` multiplies the factor sums, and `allowed`
// (possibly empty) removes clamped values. Returns the root belief.
Vec collect(const GraphicalCost& gc, int root, Semiring sr, double scale,
            const std::vector<Vec>& unary,
            const std::vector<std::vector<char>>& allowed) {
  const auto& bags = gc.bags();
  const int nb = static_cast<int>(bags.size());
  const int n = gc.n();
  const double identity = sr == Semiring::kMinSum ? kInf : -kInf;

  std::vector<int> order = {root};
  std::vector<int> parent(nb, -1);
  std::vector<int> parent_slot(nb, -1);
  parent[root] = root;
  for (std::size_t h = 0; h < order.size(); ++h) {
    const int u = order[h];
    for (std::size_t s = 0; s < bags[u].nbrs.size(); ++s) {
      const int c = bags[u].nbrs[s];
      if (parent[c] >= 0) continue;
      parent[c] = u;
      order.push_back(c);
    }
  }
  for (int u = 0; u < nb; ++u) {
    if (u == root) continue;
    const auto& nb_u = bags[u].nbrs;
    parent_slot[u] = static_cast<int>(
        std::find(nb_u.begin(), nb_u.end(), parent[u]) - nb_u.begin());
  }

  std::vector<Vec> msg(nb);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int u = *it;
    const auto& bd = bags[u];
    const std::size_t size = bd.vars.size();
    // Per position, the amount added for each value of its variable: the
    // unary term if this bag carries it, and the identity for removed values.
    std::vector<Vec> addend;
    std::vector<std::size_t> active;
    for (std::size_t t = 0; t < size; ++t) {
      const int var = bd.vars[t];
      const bool carries =
          std::find(bd.unary_vars.begin(), bd.unary_vars.end(), var) != bd.unary_vars.end();
      Vec add(n, 0.0);
      bool used = carries;
      if (carries) add = unary[var];
      if (!allowed.empty()) {
        for (int a = 0; a < n; ++a) {
          if (!allowed[var][a]) {
            add[a] = identity;
            used = true;
          }
        }
      }
      if (used) {
        active.push_back(addend.size());
        addend.push_back(std::move(add));
      } else {
        addend.emplace_back();
      }
    }
    Vec table(bd.base.size());
    std::vector<int> digit(size, 0);
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      double v = scale * bd.base[idx];
      for (std::size_t t : active) v += addend[t][digit[t]];
      table[idx] = v;
      for (std::size_t t = size; t-- > 0;) {
        if (++digit[t] < n) break;
        digit[t] = 0;
      }
    }
    for (std::size_t s = 0; s < bd.nbrs.size(); ++s) {
      const int c = bd.nbrs[s];
      if (c == parent[u] && u != root) continue;
      const Vec& m = msg[c];
      const auto& map = bd.sep_index[s];
      for (std::size_t idx = 0; idx < table.size(); ++idx) {
        table[idx] += m[map[idx]];
      }
    }
    if (u == root) return table;
    const int ps = parent_slot[u];
    const auto& map = bd.sep_index[ps];
    Vec out(bd.sep_size[ps], identity);
    if (sr == Semiring::kMinSum) {
      for (std::size_t idx = 0; idx < table.size(); ++idx) {
        out[map[idx]] = std::min(out[map[idx]], table[idx]);
      }
    } else {
      for (std::size_t idx = 0; idx < table.size(); ++idx) {
        out[map[idx]] = std::max(out[map[idx]], table[idx]);
      }
      Vec sum(out.size(), 0.0);
      for (std::size_t idx = 0; idx < table.size(); ++idx) {
        const double hi = out[map[idx]];
        if (hi != -kInf) sum[map[idx]] += std::exp(table[idx] - hi);
      }
      for (std::size_t e = 0; e < out.size(); ++e) {
        if (out[e] != -kInf) out[e] += std::log(sum[e]);
      }
    }
    msg[u] = std::move(out);
  }
  return {};
}

// Min over the root belief grouped by the value of variable v.
Vec min_marginal(const GraphicalCost& gc, int v, const Vec& belief) {
  const auto& bd = gc.bags()[gc.junction_tree().variable_bag[v]];
  const int n = gc.n();
  const std::size_t size = bd.vars.size();
  const std::size_t t =
      std::lower_bound(bd.vars.begin(), bd.vars.end(), v) - bd.vars.begin();
  std::uint64_t stride = 1;
  for (std::size_t e = t + 1; e < size; ++e) stride *= n;
  Vec mm(n, kInf);
  const std::size_t block = stride * static_cast<std::size_t>(n);
  for (std::size_t start = 0; start < belief.size(); start += block) {
    for (int a = 0; a < n; ++a) {
      const double* row = belief.data() + start + a * stride;
      for (std::size_t e = 0; e < stride; ++e) mm[a] = std::min(mm[a], row[e]);
    }
  }
  return mm;
}

void check_weights(const GraphicalCost& gc, const DualWeights& p) {
  if (p.n() != gc.n() || p.k() != gc.k()) {
    throw InvalidArgument("graphical: weight dimensions do not match");
  }
}

}  // namespace

OracleAnswerArg gm_mode(const GraphicalCost& gc, const DualWeights& p) {
  check_weights(gc, p);
  const int k = gc.k();
  const int n = gc.n();
  // A weight of -inf removes that value of the variable.
  std::vector<Vec> unary(k, Vec(n));
  std::vector<std::vector<char>> allowed(k, std::vector<char>(n, 1));
  for (int v = 0; v < k; ++v) {
    for (int a = 0; a < n; ++a) {
      if (p[v][a] == -kInf) {
        allowed[v][a] = 0;
        unary[v][a] = 0.0;
      } else {
        unary[v][a] = -p[v][a];
      }
    }
  }
  const auto& jt = gc.junction_tree();
  double opt = kInf;
  OracleAnswerArg ans;
  ans.tuple.assign(k, 0);
  // Fix variables in index order to the smallest value that keeps the optimum.
  for (int v = 0; v < k; ++v) {
    const Vec belief =
        collect(gc, jt.variable_bag[v], Semiring::kMinSum, 1.0, unary, allowed);
    const Vec mm = min_marginal(gc, v, belief);
    const double here = *std::min_element(mm.begin(), mm.end());
    if (v == 0) opt = here;
    if (opt == kInf) {
      ans.tuple.assign(k, 0);
      ans.value = kInf;
      return ans;
    }
    int pick = -1;
    for (int a = 0; a < n && pick < 0; ++a) {
      if (mm[a] <= opt + kTieRelTol * (1.0 + std::abs(opt))) pick = a;
    }
    if (pick < 0) pick = static_cast<int>(std::min_element(mm.begin(), mm.end()) - mm.begin());
    ans.tuple[v] = pick;
    std::fill(allowed[v].begin(), allowed[v].end(), 0);
    allowed[v][pick] = 1;
  }
  ans.value = gc.evaluate(ans.tuple) - p.sum_at(ans.tuple);
  return ans;
}

double gm_logpartition(const GraphicalCost& gc, const DualWeights& p,
                       double eta) {
  check_weights(gc, p);
  if (!(eta > 0)) throw InvalidArgument("gm_logpartition: eta must be > 0");
  const int k = gc.k();
  const int n = gc.n();
  std::vector<Vec> unary(k, Vec(n));
  for (int v = 0; v < k; ++v) {
    for (int a = 0; a < n; ++a) unary[v][a] = eta * p[v][a];
  }
  const Vec belief = collect(gc, 0, Semiring::kLogSum, -eta, unary, {});
  const double lz = log_sum_exp(belief);
  return lz == -kInf ? kInf : -lz / eta;
}

StructuredCost make_graphical_cost(std::shared_ptr<const GraphicalCost> gc) {
  StructuredCost sc(gc->n(), gc->k(), gc->cmax(), "graphical");
  sc.set_min([gc](const DualWeights& p) { return gm_mode(*gc, p).value; })
      .set_argmin([gc](const DualWeights& p) { return gm_mode(*gc, p); })
      .set_smin([gc](const DualWeights& p, double eta) {
        return gm_logpartition(*gc, p, eta);
      })
      .set_eval([gc](const Tuple& t) { return gc->evaluate(t); });
  return complete_oracles(sc);
}

}  // namespace motkit
