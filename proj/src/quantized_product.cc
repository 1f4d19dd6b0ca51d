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
#include <functional>
#include <string>

#include "motkit/lowrank.h"

namespace motkit {

namespace {

// Running log-sum-exp over many slots.
struct LogSumSlots {
  explicit LogSumSlots(std::size_t size) : hi(size, -kInf), sum(size, 0.0) {}
  void add(std::size_t s, double x) {
    if (x == -kInf) return;
    if (x > hi[s]) {
      sum[s] = sum[s] * std::exp(hi[s] - x) + 1.0;
      hi[s] = x;
    } else {
      sum[s] += std::exp(x - hi[s]);
    }
  }
  double value(std::size_t s) const {
    return hi[s] == -kInf ? -kInf : hi[s] + std::log(sum[s]);
  }
  Vec hi;
  Vec sum;
};

}  // namespace

QuantizedProduct::QuantizedProduct(const LowRankFactors& r, double eps_b,
                                   std::size_t state_cap)
    : n_(r.n), k_(r.k), eps_b_(eps_b) {
  if (!(eps_b > 0) || !std::isfinite(eps_b)) {
    throw InvalidArgument("quantized product: eps_b must be positive and finite");
  }
  struct Raw {
    double sign;
    double log_coef;
    std::vector<int> varying;
    std::vector<Vec> log_abs;
    double max_abs;
  };
  std::vector<Raw> raws;
  for (const auto& term : r.u) {
    Raw raw{1.0, 0.0, {}, std::vector<Vec>(k_), 0.0};
    bool zero = false;
    double log_max = 0.0;
    for (int i = 0; i < k_ && !zero; ++i) {
      const Vec& v = term[i];
      const bool all_zero = std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
      if (all_zero) {
        zero = true;
        break;
      }
      const bool pos = std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
      const bool neg = std::all_of(v.begin(), v.end(), [](double x) { return x < 0.0; });
      if (!pos && !neg) {
        throw CapabilityError(
            "quantized product: factor vectors must be strictly positive, "
            "strictly negative or identically zero");
      }
      if (neg) raw.sign = -raw.sign;
      const bool constant = std::all_of(v.begin(), v.end(), [&v](double x) { return x == v[0]; });
      if (constant) {
        raw.log_coef += std::log(std::abs(v[0]));
        continue;
      }
      raw.varying.push_back(i);
      Vec la(n_);
      for (int j = 0; j < n_; ++j) la[j] = std::log(std::abs(v[j]));
      log_max += *std::max_element(la.begin(), la.end());
      raw.log_abs[i] = std::move(la);
    }
    if (zero) continue;
    if (raw.varying.empty()) {
      const_value_ += raw.sign * std::exp(raw.log_coef);
      continue;
    }
    raw.max_abs = std::exp(raw.log_coef + log_max);
    raws.push_back(std::move(raw));
  }
  double total_abs = 0.0;
  for (const Raw& raw : raws) total_abs += raw.max_abs;
  max_abs_ = std::abs(const_value_);

  for (const Raw& raw : raws) {
    Term t;
    t.sign = raw.sign;
    t.log_coef = raw.log_coef;
    const int kv = static_cast<int>(raw.varying.size());
    // e^{kv delta / 2} - 1 = eps_b / total_abs bounds the relative error.
    t.delta = 2.0 * std::log1p(eps_b / total_abs) / kv;
    t.first = raw.varying.front();
    t.last = raw.varying.back();
    t.shift.assign(k_, {});
    t.range.assign(k_, 0);
    t.base = 0;
    int total_range = 0;
    for (int i : raw.varying) {
      std::vector<int> sh(n_);
      for (int j = 0; j < n_; ++j) {
        sh[j] = static_cast<int>(std::lround(raw.log_abs[i][j] / t.delta));
      }
      const int lo = *std::min_element(sh.begin(), sh.end());
      for (int& s : sh) s -= lo;
      t.base += lo;
      t.range[i] = *std::max_element(sh.begin(), sh.end());
      total_range += t.range[i];
      t.shift[i] = std::move(sh);
    }
    t.value.resize(total_range + 1);
    for (int s = 0; s <= total_range; ++s) {
      t.value[s] = t.sign * std::exp(t.log_coef + t.delta * (t.base + s));
    }
    max_abs_ += std::max(std::abs(t.value.front()), std::abs(t.value.back()));
    terms_.push_back(std::move(t));
  }

  cuts_.resize(k_ + 1);
  for (int c = 0; c <= k_; ++c) {
    Cut& cut = cuts_[c];
    for (int ti = 0; ti < static_cast<int>(terms_.size()); ++ti) {
      const Term& t = terms_[ti];
      if (t.first <= c - 1 && c - 1 < t.last) {
        std::size_t rad = 1;
        for (int i = 0; i < c; ++i) rad += t.range[i];
        cut.terms.push_back(ti);
        cut.radix.push_back(rad);
      }
    }
    cut.stride.assign(cut.terms.size(), 1);
    cut.size = 1;
    for (int e = static_cast<int>(cut.terms.size()) - 1; e >= 0; --e) {
      cut.stride[e] = cut.size;
      if (cut.size > state_cap / cut.radix[e]) {
        throw CapExceeded("quantized product: state space exceeds the cap " +
                          std::to_string(state_cap));
      }
      cut.size *= cut.radix[e];
    }
  }
  fwd_.assign(k_ + 1, {});
  bwd_.assign(k_ + 1, {});
  fwd_rows_.assign(k_, {});
  bwd_rows_.assign(k_, {});
  fwd_[0] = {0.0};
  bwd_[k_] = {0.0};
  bwd_valid_from_ = k_;
}

std::size_t QuantizedProduct::max_states() const {
  std::size_t m = 0;
  for (const Cut& c : cuts_) m = std::max(m, c.size);
  return m;
}

double QuantizedProduct::eval(const Tuple& tuple) const {
  if (static_cast<int>(tuple.size()) != k_) {
    throw InvalidArgument("quantized product: tuple has wrong length");
  }
  double v = const_value_;
  for (const Term& t : terms_) {
    int s = 0;
    for (int i = t.first; i <= t.last; ++i) {
      if (!t.shift[i].empty()) s += t.shift[i][tuple[i]];
    }
    v += t.value[s];
  }
  return v;
}

// Calls visit(in_index, j, out_index, contrib) for every state at cut i and
// every value j of coordinate i. `contrib` sums the terms folded in at i.
// States with skip_state(in_index) and values with skip_value(j) are passed
// over without evaluating their contribution.
template <class Visit, class SkipState, class SkipValue>
void QuantizedProduct::for_each_transition(int i, Visit&& visit,
                                           SkipState&& skip_state,
                                           SkipValue&& skip_value) const {
  const Cut& in = cuts_[i];
  const Cut& out = cuts_[i + 1];
  const std::size_t nin = in.terms.size();
  // For each out term: its position in `in` (or -1) and its stride.
  std::vector<int> out_from(out.terms.size(), -1);
  for (std::size_t o = 0; o < out.terms.size(); ++o) {
    for (std::size_t e = 0; e < nin; ++e) {
      if (in.terms[e] == out.terms[o]) out_from[o] = static_cast<int>(e);
    }
  }
  std::vector<std::size_t> off(n_, 0);
  for (std::size_t o = 0; o < out.terms.size(); ++o) {
    const Term& t = terms_[out.terms[o]];
    if (t.shift[i].empty()) continue;
    for (int j = 0; j < n_; ++j) off[j] += t.shift[i][j] * out.stride[o];
  }
  // Terms folded in at coordinate i, with their position in `in` (or -1 when
  // the term starts and ends at i).
  std::vector<std::pair<int, int>> folds;
  for (int ti = 0; ti < static_cast<int>(terms_.size()); ++ti) {
    if (terms_[ti].last != i) continue;
    int pos = -1;
    for (std::size_t e = 0; e < nin; ++e) {
      if (in.terms[e] == ti) pos = static_cast<int>(e);
    }
    folds.emplace_back(ti, pos);
  }
  std::vector<std::size_t> sums(nin, 0);
  std::vector<char> value_on(n_);
  for (int j = 0; j < n_; ++j) value_on[j] = !skip_value(j);
  for (std::size_t idx = 0; idx < in.size; ++idx) {
    if (skip_state(idx)) {
      for (int e = static_cast<int>(nin) - 1; e >= 0; --e) {
        if (++sums[e] < in.radix[e]) break;
        sums[e] = 0;
      }
      continue;
    }
    std::size_t base = 0;
    for (std::size_t o = 0; o < out.terms.size(); ++o) {
      if (out_from[o] >= 0) base += sums[out_from[o]] * out.stride[o];
    }
    for (int j = 0; j < n_; ++j) {
      if (!value_on[j]) continue;
      double contrib = 0.0;
      for (const auto& [ti, pos] : folds) {
        const Term& t = terms_[ti];
        const std::size_t s = (pos >= 0 ? sums[pos] : 0) + t.shift[i][j];
        contrib += t.value[s];
      }
      visit(idx, j, base + off[j], contrib);
    }
    for (int e = static_cast<int>(nin) - 1; e >= 0; --e) {
      if (++sums[e] < in.radix[e]) break;
      sums[e] = 0;
    }
  }
}

void QuantizedProduct::forward_layer(int i, const Vec& row, double eta,
                                     const Vec& in, Vec& out) const {
  LogSumSlots acc(cuts_[i + 1].size);
  for_each_transition(i, [&](std::size_t idx, int j, std::size_t nidx,
                             double contrib) {
    acc.add(nidx, in[idx] + row[j] - eta * contrib);
  }, [&](std::size_t idx) { return in[idx] == -kInf; },
     [&](int j) { return row[j] == -kInf; });
  out.resize(acc.hi.size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = acc.value(s);
}

void QuantizedProduct::backward_layer(int i, const Vec& row, double eta,
                                      const Vec& in, Vec& out) const {
  LogSumSlots acc(cuts_[i].size);
  for_each_transition(i, [&](std::size_t idx, int j, std::size_t nidx,
                             double contrib) {
    if (in[nidx] == -kInf) return;
    acc.add(idx, row[j] - eta * contrib + in[nidx]);
  }, [](std::size_t) { return false; },
     [&](int j) { return row[j] == -kInf; });
  out.resize(acc.hi.size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = acc.value(s);
}

void QuantizedProduct::refresh_cache(const std::vector<Vec>& log_d, double eta,
                                     int need_fwd, int need_bwd) const {
  if (static_cast<int>(log_d.size()) != k_) {
    throw InvalidArgument("quantized product: need k scaling rows");
  }
  for (const Vec& row : log_d) {
    if (static_cast<int>(row.size()) != n_) {
      throw InvalidArgument("quantized product: scaling rows must have n entries");
    }
  }
  if (eta != cache_eta_) {
    cache_eta_ = eta;
    fwd_valid_ = 0;
    bwd_valid_from_ = k_;
  }
  // fwd_valid_ and bwd_valid_from_ bound the layers computed from the
  // stored rows. Only the layers that depend on a changed row are rebuilt,
  // and layers beyond the request are kept: a later call whose rows match
  // the stored ones again reuses them.
  int fwd_ok = fwd_valid_;
  for (int i = 0; i < fwd_valid_; ++i) {
    if (log_d[i] != fwd_rows_[i]) {
      fwd_ok = i;
      break;
    }
  }
  if (fwd_ok < need_fwd) {
    for (int i = fwd_ok; i < need_fwd; ++i) {
      forward_layer(i, log_d[i], eta, fwd_[i], fwd_[i + 1]);
      fwd_rows_[i] = log_d[i];
    }
    fwd_valid_ = need_fwd;
  }
  int bwd_ok = bwd_valid_from_;
  for (int i = k_ - 1; i >= bwd_valid_from_; --i) {
    if (log_d[i] != bwd_rows_[i]) {
      bwd_ok = i + 1;
      break;
    }
  }
  if (bwd_ok > need_bwd) {
    for (int i = bwd_ok - 1; i >= need_bwd; --i) {
      backward_layer(i, log_d[i], eta, bwd_[i + 1], bwd_[i]);
      bwd_rows_[i] = log_d[i];
    }
    bwd_valid_from_ = need_bwd;
  }
}

double QuantizedProduct::log_partition(const std::vector<Vec>& log_d,
                                       double eta) const {
  if (!(eta > 0)) throw InvalidArgument("quantized product: eta must be > 0");
  std::lock_guard<std::mutex> lock(mu_);
  refresh_cache(log_d, eta, k_, k_);
  const double v = fwd_[k_][0];
  return v == -kInf ? -kInf : v - eta * const_value_;
}

Vec QuantizedProduct::log_marg(const std::vector<Vec>& log_d, double eta,
                               int i) const {
  if (!(eta > 0)) throw InvalidArgument("quantized product: eta must be > 0");
  if (i < 0 || i >= k_) throw InvalidArgument("quantized product: bad coordinate");
  std::lock_guard<std::mutex> lock(mu_);
  refresh_cache(log_d, eta, i, i + 1);
  const Vec& f = fwd_[i];
  const Vec& b = bwd_[i + 1];
  const Vec& row = log_d[i];
  LogSumSlots acc(n_);
  for_each_transition(i, [&](std::size_t idx, int j, std::size_t nidx,
                             double contrib) {
    if (b[nidx] == -kInf) return;
    acc.add(j, f[idx] - eta * contrib + b[nidx]);
  }, [&](std::size_t idx) { return f[idx] == -kInf; },
     [&](int j) { return row[j] == -kInf; });
  Vec out(n_);
  for (int j = 0; j < n_; ++j) {
    const double v = acc.value(j);
    out[j] = (v == -kInf || row[j] == -kInf) ? -kInf
                                             : v + row[j] - eta * const_value_;
  }
  return out;
}

void QuantizedProduct::min_backward(const std::vector<Vec>& w,
                                    std::vector<Vec>& bm) const {
  bm.assign(k_ + 1, {});
  bm[k_] = {0.0};
  for (int i = k_ - 1; i >= 0; --i) {
    Vec& out = bm[i];
    out.assign(cuts_[i].size, kInf);
    const Vec& in = bm[i + 1];
    const Vec& row = w[i];
    for_each_transition(i, [&](std::size_t idx, int j, std::size_t nidx,
                               double contrib) {
      if (in[nidx] == kInf) return;
      out[idx] = std::min(out[idx], row[j] + contrib + in[nidx]);
    }, [](std::size_t) { return false; },
       [&](int j) { return row[j] == kInf; });
  }
}

OracleAnswerArg QuantizedProduct::argmin(const std::vector<Vec>& w,
                                         const std::vector<Tuple>& excluded) const {
  if (static_cast<int>(w.size()) != k_) {
    throw InvalidArgument("quantized product: need k weight rows");
  }
  for (const Vec& row : w) {
    if (static_cast<int>(row.size()) != n_) {
      throw InvalidArgument("quantized product: weight rows must have n entries");
    }
  }
  std::vector<Vec> bm;
  min_backward(w, bm);

  // Single-path walker: per-term running sums (-1 before the term starts).
  struct Walker {
    std::vector<long> sums;
    double acc = 0.0;
  };
  const auto state_index = [this](const Walker& wk, int c) {
    const Cut& cut = cuts_[c];
    std::size_t idx = 0;
    for (std::size_t e = 0; e < cut.terms.size(); ++e) {
      idx += static_cast<std::size_t>(wk.sums[cut.terms[e]]) * cut.stride[e];
    }
    return idx;
  };
  // Advances the walker through coordinate i with value j; returns the
  // contribution of the step.
  const auto step = [this, &w](Walker& wk, int i, int j) {
    double contrib = w[i][j];
    for (std::size_t ti = 0; ti < terms_.size(); ++ti) {
      const Term& t = terms_[ti];
      if (t.shift[i].empty()) continue;
      if (wk.sums[ti] < 0) wk.sums[ti] = 0;
      wk.sums[ti] += t.shift[i][j];
      if (t.last == i) contrib += t.value[wk.sums[ti]];
    }
    return contrib;
  };
  const auto peek = [&](const Walker& wk, int i, int j) {
    Walker copy = wk;
    const double c = step(copy, i, j);
    if (c == kInf) return kInf;
    const double rest = bm[i + 1][state_index(copy, i + 1)];
    return copy.acc + c + rest;
  };
  const auto fresh = [this]() {
    Walker wk;
    wk.sums.assign(terms_.size(), -1);
    return wk;
  };
  const auto tol = [](double opt) { return kTieRelTol * (1.0 + std::abs(opt)); };

  // Greedy lexicographic decode below a fixed prefix.
  const auto decode = [&](const Tuple& prefix, double opt) {
    Walker wk = fresh();
    Tuple t(k_, 0);
    for (int i = 0; i < k_; ++i) {
      int pick = -1;
      if (i < static_cast<int>(prefix.size())) {
        pick = prefix[i];
      } else {
        double best = kInf;
        int best_j = -1;
        for (int j = 0; j < n_ && pick < 0; ++j) {
          const double v = peek(wk, i, j) + const_value_;
          if (v <= opt + tol(opt)) pick = j;
          if (v < best) {
            best = v;
            best_j = j;
          }
        }
        if (pick < 0) pick = best_j < 0 ? 0 : best_j;
      }
      t[i] = pick;
      wk.acc += step(wk, i, pick);
    }
    return OracleAnswerArg{t, wk.acc + const_value_};
  };

  if (excluded.empty()) {
    const double opt = bm[0][0] + const_value_;
    if (opt == kInf) return {Tuple(k_, 0), kInf};
    return decode({}, opt);
  }

  // Decompose the complement of `excluded` into prefix-fixed subcubes.
  struct Candidate {
    Tuple prefix;
    double value;
  };
  std::vector<Candidate> cands;
  Tuple prefix;
  const std::function<void(std::size_t, std::size_t, const Walker&)> rec =
      [&](std::size_t lo, std::size_t hi, const Walker& wk) {
        const int d = static_cast<int>(prefix.size());
        std::size_t p = lo;
        for (int a = 0; a < n_; ++a) {
          std::size_t q = p;
          while (q < hi && excluded[q][d] == a) ++q;
          Walker next = wk;
          const double c = step(next, d, a);
          if (c != kInf) {
            next.acc += c;
            prefix.push_back(a);
            if (q == p) {
              const double rest = bm[d + 1][state_index(next, d + 1)];
              cands.push_back({prefix, next.acc + rest + const_value_});
            } else if (d + 1 < k_) {
              rec(p, q, next);
            }
            prefix.pop_back();
          }
          p = q;
        }
      };
  rec(0, excluded.size(), fresh());
  double opt = kInf;
  for (const Candidate& c : cands) opt = std::min(opt, c.value);
  if (opt == kInf) return {Tuple(k_, 0), kInf};
  OracleAnswerArg best{Tuple(), kInf};
  for (const Candidate& c : cands) {
    if (c.value > opt + tol(opt)) continue;
    OracleAnswerArg a = decode(c.prefix, opt);
    if (best.tuple.empty() || a.tuple < best.tuple) best = a;
  }
  return best;
}

}  // namespace motkit
