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

#include <cmath>
#include <memory>

#include "motkit/apps.h"

namespace motkit {

namespace {

// Per-edge split of the weights. state[e] is 0 for a free edge, -1 when the
// edge must be absent and +1 when it must be present. `base` collects the
// weight terms that do not depend on the free choices.
struct EdgeSplit {
  bool infeasible = false;
  double base = 0.0;
  std::vector<int> state;
  Vec x;
};

EdgeSplit split_weights(const UGraph& g, const DualWeights& p) {
  const std::size_t m = g.edges.size();
  if (p.n() != 2 || p.k() != static_cast<int>(m)) {
    throw InvalidArgument("reliability oracle: weights must be 2 x |E|");
  }
  EdgeSplit s;
  s.state.assign(m, 0);
  s.x.assign(m, 0.0);
  for (std::size_t e = 0; e < m; ++e) {
    const double absent = p[static_cast<int>(e)][0];
    const double present = p[static_cast<int>(e)][1];
    if (absent == -kInf && present == -kInf) {
      s.infeasible = true;
      return s;
    }
    if (present == -kInf) {
      s.state[e] = -1;
      s.base -= absent;
    } else if (absent == -kInf) {
      s.state[e] = 1;
      s.base -= present;
    } else {
      s.base -= absent;
      s.x[e] = absent - present;
    }
  }
  return s;
}

bool tuple_connects(const UGraph& g, const Tuple& t) {
  std::vector<char> keep(g.edges.size());
  for (std::size_t e = 0; e < keep.size(); ++e) keep[e] = static_cast<char>(t[e] == 1);
  if (keep.empty()) return g.vertices <= 1;
  return is_connected(g, keep);
}

void check_tuple(const UGraph& g, const Tuple& t) {
  if (t.size() != g.edges.size()) {
    throw InvalidArgument("reliability: tuple length does not match the edge count");
  }
}

}  // namespace

void validate_reliability(const ReliabilityProblem& pr) {
  validate_graph(pr.graph);
  if (pr.graph.vertices < 2) throw InvalidArgument("reliability: need at least two vertices");
  if (pr.graph.edges.empty()) throw InvalidArgument("reliability: need at least one edge");
  if (pr.q.size() != pr.graph.edges.size()) {
    throw InvalidArgument("reliability: need one probability per edge");
  }
  for (double q : pr.q) {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw InvalidArgument("reliability: edge probabilities must lie in [0, 1]");
    }
  }
}

Marginals reliability_marginals(const ReliabilityProblem& pr) {
  std::vector<Vec> mu;
  for (double q : pr.q) mu.push_back({1.0 - q, q});
  return Marginals(std::move(mu));
}

SetOracle connected_set_oracle(const UGraph& g_in) {
  validate_graph(g_in);
  auto g = std::make_shared<const UGraph>(g_in);
  SetOracle s;
  s.n = 2;
  s.k = static_cast<int>(g->edges.size());
  s.min = [g](const DualWeights& p) {
    const EdgeSplit sp = split_weights(*g, p);
    if (sp.infeasible) return kInf;
    UGraph allowed;
    allowed.vertices = g->vertices;
    Vec x;
    for (std::size_t e = 0; e < g->edges.size(); ++e) {
      if (sp.state[e] == -1) continue;
      allowed.edges.push_back(g->edges[e]);
      // Forced edges cost nothing beyond `base`, and a nonpositive weight is
      // always taken by the spanning-tree step.
      x.push_back(sp.state[e] == 1 ? 0.0 : sp.x[e]);
    }
    if (!is_connected(allowed)) return kInf;
    return sp.base + min_weight_connected_subgraph(allowed, x).value;
  };
  s.amin = [min = s.min](const DualWeights& p, double) { return min(p); };
  s.contains = [g](const Tuple& t) {
    check_tuple(*g, t);
    return tuple_connects(*g, t);
  };
  return s;
}

SetOracle disconnected_set_oracle(const UGraph& g_in) {
  validate_graph(g_in);
  auto g = std::make_shared<const UGraph>(g_in);
  SetOracle s;
  s.n = 2;
  s.k = static_cast<int>(g->edges.size());
  s.min = [g](const DualWeights& p) {
    const EdgeSplit sp = split_weights(*g, p);
    if (sp.infeasible || g->vertices < 2) return kInf;
    // Take every negative free edge, then drop the cheapest cut through
    // them. Forced edges get a weight above any such cut, so a cut that
    // reaches it must separate a forced edge and no disconnected H exists.
    UGraph h;
    h.vertices = g->vertices;
    Vec w;
    double negative = 0.0;
    for (std::size_t e = 0; e < g->edges.size(); ++e) {
      if (sp.state[e] == 0 && sp.x[e] < 0) {
        h.edges.push_back(g->edges[e]);
        w.push_back(-sp.x[e]);
        negative += sp.x[e];
      }
    }
    const double big = 1.0 + 2.0 * (-negative);
    for (std::size_t e = 0; e < g->edges.size(); ++e) {
      if (sp.state[e] == 1) {
        h.edges.push_back(g->edges[e]);
        w.push_back(big);
      }
    }
    const MinCut cut = stoer_wagner_mincut(h, w);
    if (cut.value >= big) return kInf;
    return sp.base + negative + cut.value;
  };
  s.amin = [min = s.min](const DualWeights& p, double) { return min(p); };
  s.contains = [g](const Tuple& t) {
    check_tuple(*g, t);
    return !tuple_connects(*g, t);
  };
  return s;
}

StructuredCost build_reliability_cost(const ReliabilityProblem& pr) {
  validate_reliability(pr);
  // Best case minimizes P[disconnected], so S is the connected edge sets.
  // Worst case minimizes P[connected], so S is the disconnected ones.
  SetOracle s = pr.mode == ReliabilityMode::kBest ? connected_set_oracle(pr.graph)
                                                  : disconnected_set_oracle(pr.graph);
  return make_setopt_cost(std::move(s));
}

ReliabilityResult network_reliability(const ReliabilityProblem& pr, Engine engine,
                                      double eps, const EngineOptions& options,
                                      const MwuOptions& mwu) {
  const StructuredCost sc = build_reliability_cost(pr);
  const Marginals m = reliability_marginals(pr);
  ReliabilityResult out;
  out.mode = pr.mode;
  switch (engine) {
    case Engine::kSinkhorn:
      throw CapabilityError(
          "setopt: SMIN set oracle unavailable (SINKHORN needs SMIN or MARG); use mwu or colgen");
    case Engine::kColgen: {
      ColgenOptions o;
      if (options.max_iters > 0) o.max_iters = options.max_iters;
      out.report = colgen_solve(sc, m, o);
      break;
    }
    case Engine::kMwu: {
      MwuOptions o = mwu;
      if (options.max_iters > 0) o.max_iterations = options.max_iters;
      out.report = mwu_solve(sc, m, eps, o);
      break;
    }
  }
  const double value = std::min(1.0, std::max(0.0, out.report.value));
  out.probability = pr.mode == ReliabilityMode::kBest ? 1.0 - value : value;
  return out;
}

double independent_reliability(const ReliabilityProblem& pr) {
  validate_reliability(pr);
  const int k = static_cast<int>(pr.graph.edges.size());
  checked_power(2, k, brute_force_cap());
  Tuple t(k, 0);
  double total = 0.0;
  do {
    double prob = 1.0;
    for (int e = 0; e < k; ++e) prob *= t[e] == 1 ? pr.q[e] : 1.0 - pr.q[e];
    if (prob > 0 && tuple_connects(pr.graph, t)) total += prob;
  } while (next_tuple(t, 2));
  return total;
}

}  // namespace motkit
