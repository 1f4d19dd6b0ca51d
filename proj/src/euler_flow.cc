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
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>
#include <utility>

#include "motkit/apps.h"

namespace motkit {

namespace {

double squared_distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

std::vector<int> parse_permutation(const std::string& spec, int n) {
  std::vector<int> perm;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(item, &pos);
    } catch (const std::exception&) {
      throw InvalidArgument("euler flow: bad permutation entry '" + item + "'");
    }
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size()) {
      throw InvalidArgument("euler flow: bad permutation entry '" + item + "'");
    }
    perm.push_back(v);
  }
  if (static_cast<int>(perm.size()) != n) {
    throw InvalidArgument("euler flow: permutation has " + std::to_string(perm.size()) +
                          " entries, expected " + std::to_string(n));
  }
  std::vector<char> seen(n, 0);
  for (int v : perm) {
    if (v < 0 || v >= n || seen[v]) {
      throw InvalidArgument("euler flow: explicit sigma is not a permutation of 0..n-1");
    }
    seen[v] = 1;
  }
  return perm;
}

std::vector<TransportRow> rows_from_map(const std::map<std::tuple<int, int, int>, double>& acc,
                                        double threshold) {
  std::vector<TransportRow> rows;
  for (const auto& [key, mass] : acc) {
    if (mass > threshold) {
      rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), mass});
    }
  }
  return rows;
}

// Joint marginal of coordinates (a, b) of the scaled component, one MARG call
// per value of a.
std::vector<Vec> scaled_pair_marginal(const ScaledPlan& sp, int a, int b) {
  std::vector<Vec> out(sp.n, Vec(sp.n, 0.0));
  for (int j = 0; j < sp.n; ++j) {
    if (sp.log_d[a][j] == -kInf) continue;
    std::vector<Vec> masked = sp.log_d;
    for (int x = 0; x < sp.n; ++x) {
      if (x != j) masked[a][x] = -kInf;
    }
    const Vec lm = sp.cost->log_marg(masked, sp.eta, b);
    for (int x = 0; x < sp.n; ++x) out[j][x] = std::exp(lm[x]);
  }
  return out;
}

}  // namespace

EulerFlowProblem make_grid_euler_flow(int n, int k, const std::string& sigma_spec) {
  if (n < 2 || k < 2) throw InvalidArgument("euler flow: n and k must be >= 2");
  EulerFlowProblem pr;
  pr.k = k;
  for (int j = 0; j < n; ++j) {
    pr.points.push_back({static_cast<double>(j) / static_cast<double>(n - 1)});
  }
  const bool named = sigma_spec == "identity" || sigma_spec == "shift-half" ||
                     sigma_spec == "double-cover" || sigma_spec == "reverse";
  if (!named) {
    for (int i : parse_permutation(sigma_spec, n)) pr.sigma_points.push_back(pr.points[i]);
  } else {
    for (int j = 0; j < n; ++j) {
      const double x = pr.points[j][0];
      double y = x;
      if (sigma_spec == "shift-half") {
        y = std::fmod(x + 0.5, 1.0);
      } else if (sigma_spec == "double-cover") {
        y = std::min(2.0 * x, 2.0 - 2.0 * x);
      } else if (sigma_spec == "reverse") {
        y = 1.0 - x;
      }
      pr.sigma_points.push_back({y});
    }
  }
  validate_euler_flow(pr);
  return pr;
}

void validate_euler_flow(const EulerFlowProblem& pr) {
  const int n = pr.n();
  if (n < 2 || pr.k < 2) throw InvalidArgument("euler flow: n and k must be >= 2");
  if (static_cast<int>(pr.sigma_points.size()) != n) {
    throw InvalidArgument("euler flow: sigma must give one image per point");
  }
  const std::size_t d = pr.points[0].size();
  if (d < 1) throw InvalidArgument("euler flow: points need dimension >= 1");
  for (int j = 0; j < n; ++j) {
    if (pr.points[j].size() != d || pr.sigma_points[j].size() != d) {
      throw InvalidArgument("euler flow: all points must share one dimension");
    }
    for (std::size_t c = 0; c < d; ++c) {
      if (!std::isfinite(pr.points[j][c]) || !std::isfinite(pr.sigma_points[j][c])) {
        throw InvalidArgument("euler flow: point coordinates must be finite");
      }
    }
  }
}

std::shared_ptr<const GraphicalCost> build_euler_flow_cost(const EulerFlowProblem& pr) {
  validate_euler_flow(pr);
  const int n = pr.n();
  const int k = pr.k;
  const auto step_table = [&]() {
    Vec table(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) table[a * n + b] = squared_distance(pr.points[b], pr.points[a]);
    }
    return table;
  };
  // Scope {0, k-1}: a = j_0, b = j_{k-1}.
  Vec closure(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      closure[a * n + b] = squared_distance(pr.sigma_points[a], pr.points[b]);
    }
  }
  std::vector<Factor> factors;
  if (k == 2) {
    Vec table = step_table();
    for (std::size_t e = 0; e < table.size(); ++e) table[e] += closure[e];
    factors.push_back({{0, 1}, std::move(table)});
  } else {
    for (int t = 0; t + 1 < k; ++t) factors.push_back({{t, t + 1}, step_table()});
    factors.push_back({{0, k - 1}, std::move(closure)});
  }
  return std::make_shared<const GraphicalCost>(n, k, std::move(factors));
}

double euler_flow_cost_at(const EulerFlowProblem& pr, const Tuple& t) {
  if (static_cast<int>(t.size()) != pr.k) {
    throw InvalidArgument("euler flow: tuple length does not match k");
  }
  double c = 0.0;
  for (int s = 0; s + 1 < pr.k; ++s) c += squared_distance(pr.points[t[s + 1]], pr.points[t[s]]);
  c += squared_distance(pr.sigma_points[t[0]], pr.points[t[pr.k - 1]]);
  return c;
}

std::vector<TransportRow> trajectory_rows(const SparsePlan& plan, double threshold) {
  const int k = plan.k();
  std::map<std::tuple<int, int, int>, double> acc;
  for (const PlanEntry& e : plan.entries()) {
    if (e.mass <= 0) continue;
    for (int t = 0; t + 1 < k; ++t) acc[{t + 1, e.index[t], e.index[t + 1]}] += e.mass;
    acc[{k, e.index[k - 1], e.index[0]}] += e.mass;
  }
  return rows_from_map(acc, threshold);
}

std::vector<TransportRow> trajectory_rows(const ScaledPlan& plan, double threshold) {
  const int n = plan.n;
  const int k = plan.k;
  // Sums of the product-component vectors, used to marginalize it.
  Vec vsum(k, 0.0);
  for (int i = 0; i < k; ++i) {
    for (double x : plan.v[i]) vsum[i] += x;
  }
  std::map<std::tuple<int, int, int>, double> acc;
  const auto add_pair = [&](int label, int from, int to) {
    const std::vector<Vec> joint = scaled_pair_marginal(plan, from, to);
    double rest = 1.0;
    for (int i = 0; i < k; ++i) {
      if (i != from && i != to) rest *= vsum[i];
    }
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const double mass = joint[a][b] + plan.v[from][a] * plan.v[to][b] * rest;
        if (mass > 0) acc[{label, a, b}] += mass;
      }
    }
  };
  for (int t = 0; t + 1 < k; ++t) add_pair(t + 1, t, t + 1);
  add_pair(k, k - 1, 0);
  return rows_from_map(acc, threshold);
}

std::string trajectory_csv(const std::vector<TransportRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "t,j_from,j_to,mass\n";
  for (const TransportRow& r : rows) {
    os << r.t << ',' << r.j_from << ',' << r.j_to << ',' << r.mass << '\n';
  }
  return os.str();
}

SolveReport solve_euler_flow(const EulerFlowProblem& pr, Engine engine, double eps,
                             const EngineOptions& options) {
  const auto gc = build_euler_flow_cost(pr);
  const StructuredCost sc = make_graphical_cost(gc);
  const Marginals m = Marginals::uniform(pr.n(), pr.k);
  switch (engine) {
    case Engine::kColgen: {
      ColgenOptions o;
      if (options.max_iters > 0) o.max_iters = options.max_iters;
      return colgen_solve(sc, m, o);
    }
    case Engine::kSinkhorn: {
      SinkhornOptions o;
      o.seed = options.seed;
      if (options.max_iters > 0) o.max_sweeps = options.max_iters;
      return sinkhorn_solve(sc, m, eps, o);
    }
    case Engine::kMwu: {
      MwuOptions o;
      if (options.max_iters > 0) o.max_iterations = options.max_iters;
      return mwu_solve(sc, m, eps, o);
    }
  }
  throw InvalidArgument("euler flow: unknown engine");
}

}  // namespace motkit
