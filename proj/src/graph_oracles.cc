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
#include <numeric>
#include <string>

#include "motkit/setopt.h"

namespace motkit {

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<int> parent_;
};

void check_edge_vector(const UGraph& g, const Vec& x, const char* what) {
  if (x.size() != g.edges.size()) {
    throw InvalidArgument(std::string(what) + ": one weight per edge required");
  }
}

}  // namespace

void validate_graph(const UGraph& g) {
  if (g.vertices < 1) throw InvalidArgument("graph: need at least one vertex");
  for (const UEdge& e : g.edges) {
    if (e.u < 0 || e.v < 0 || e.u >= g.vertices || e.v >= g.vertices) {
      throw InvalidArgument("graph: edge endpoint out of range");
    }
    if (e.u == e.v) throw InvalidArgument("graph: self-loops are not allowed");
  }
}

bool is_connected(const UGraph& g, const std::vector<char>& keep) {
  if (!keep.empty() && keep.size() != g.edges.size()) {
    throw InvalidArgument("is_connected: keep mask has wrong length");
  }
  UnionFind uf(g.vertices);
  int components = g.vertices;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!keep.empty() && !keep[e]) continue;
    if (uf.unite(g.edges[e].u, g.edges[e].v)) --components;
  }
  return components == 1;
}

SubgraphAnswer min_weight_connected_subgraph(const UGraph& g, const Vec& x) {
  validate_graph(g);
  check_edge_vector(g, x, "min_weight_connected_subgraph");
  if (!is_connected(g)) {
    throw InfeasibleError("min_weight_connected_subgraph: graph is disconnected");
  }
  SubgraphAnswer ans;
  ans.edges.assign(g.edges.size(), 0);
  UnionFind uf(g.vertices);
  // Nonpositive edges belong to some optimal solution, so contract them all.
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (x[e] <= 0) {
      ans.edges[e] = 1;
      ans.value += x[e];
      uf.unite(g.edges[e].u, g.edges[e].v);
    }
  }
  std::vector<std::size_t> order;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (x[e] > 0) order.push_back(e);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  for (std::size_t e : order) {
    if (uf.unite(g.edges[e].u, g.edges[e].v)) {
      ans.edges[e] = 1;
      ans.value += x[e];
    }
  }
  return ans;
}

MinCut stoer_wagner_mincut(const UGraph& g, const Vec& w) {
  validate_graph(g);
  check_edge_vector(g, w, "stoer_wagner_mincut");
  const int nv = g.vertices;
  if (nv < 2) throw InvalidArgument("stoer_wagner_mincut: need two vertices");
  for (double v : w) {
    if (!(v >= 0)) throw InvalidArgument("stoer_wagner_mincut: weights must be >= 0");
  }
  MinCut best;
  best.side.assign(nv, 0);

  // A disconnected graph has a zero cut along any component.
  {
    UnionFind uf(nv);
    for (const UEdge& e : g.edges) uf.unite(e.u, e.v);
    const int root = uf.find(0);
    bool split = false;
    for (int v = 0; v < nv; ++v) {
      best.side[v] = uf.find(v) == root;
      if (!best.side[v]) split = true;
    }
    if (split) {
      best.value = 0.0;
      return best;
    }
  }

  std::vector<Vec> adj(nv, Vec(nv, 0.0));
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    adj[g.edges[e].u][g.edges[e].v] += w[e];
    adj[g.edges[e].v][g.edges[e].u] += w[e];
  }
  // members[v]: original vertices merged into v.
  std::vector<std::vector<int>> members(nv);
  for (int v = 0; v < nv; ++v) members[v] = {v};
  std::vector<int> active(nv);
  std::iota(active.begin(), active.end(), 0);
  best.value = kInf;

  while (active.size() > 1) {
    const std::size_t m = active.size();
    Vec key(m, 0.0);
    std::vector<char> added(m, 0);
    int prev = -1;
    int last = -1;
    for (std::size_t step = 0; step < m; ++step) {
      int pick = -1;
      for (std::size_t a = 0; a < m; ++a) {
        if (!added[a] && (pick < 0 || key[a] > key[pick])) pick = static_cast<int>(a);
      }
      added[pick] = 1;
      prev = last;
      last = pick;
      if (step + 1 == m) break;
      for (std::size_t a = 0; a < m; ++a) {
        if (!added[a]) key[a] += adj[active[pick]][active[a]];
      }
    }
    const double cut_of_phase = key[last];
    const int s = active[prev];
    const int t = active[last];
    if (cut_of_phase < best.value) {
      best.value = cut_of_phase;
      std::fill(best.side.begin(), best.side.end(), 0);
      for (int v : members[t]) best.side[v] = 1;
    }
    for (int v = 0; v < nv; ++v) {
      adj[s][v] += adj[t][v];
      adj[v][s] = adj[s][v];
    }
    adj[s][s] = 0.0;
    members[s].insert(members[s].end(), members[t].begin(), members[t].end());
    active.erase(active.begin() + last);
  }
  return best;
}

SubgraphAnswer min_weight_disconnected_subgraph(const UGraph& g, const Vec& x) {
  validate_graph(g);
  check_edge_vector(g, x, "min_weight_disconnected_subgraph");
  if (g.vertices < 2) {
    throw InfeasibleError(
        "min_weight_disconnected_subgraph: a single vertex is always connected");
  }
  SubgraphAnswer ans;
  ans.edges.assign(g.edges.size(), 0);
  // Nonnegative edges never help, so H starts as all negative edges and the
  // cheapest cut through them is removed.
  UGraph neg;
  neg.vertices = g.vertices;
  Vec w;
  std::vector<std::size_t> ids;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (x[e] < 0) {
      ans.edges[e] = 1;
      ans.value += x[e];
      neg.edges.push_back(g.edges[e]);
      w.push_back(-x[e]);
      ids.push_back(e);
    }
  }
  const MinCut cut = stoer_wagner_mincut(neg, w);
  for (std::size_t f = 0; f < neg.edges.size(); ++f) {
    if (cut.side[neg.edges[f].u] != cut.side[neg.edges[f].v]) {
      ans.edges[ids[f]] = 0;
      ans.value -= x[ids[f]];
    }
  }
  return ans;
}

}  // namespace motkit
