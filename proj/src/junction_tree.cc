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
#include <set>
#include <string>

#include "motkit/graphical.h"

namespace motkit {

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

bool subset_of(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

int intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
  int c = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++c;
      ++i;
      ++j;
    }
  }
  return c;
}

}  // namespace

JunctionTree build_junction_tree(const std::vector<std::vector<int>>& scopes,
                                 int k, int width_cap) {
  if (k < 1) throw InvalidArgument("junction tree: k must be >= 1");
  if (scopes.empty()) throw InvalidArgument("junction tree: no scopes");
  std::vector<std::set<int>> adj(k);
  for (const auto& s : scopes) {
    if (s.empty()) throw InvalidArgument("junction tree: empty scope");
    for (int v : s) {
      if (v < 0 || v >= k) throw InvalidArgument("junction tree: bad variable");
    }
    for (int a : s) {
      for (int b : s) {
        if (a != b) adj[a].insert(b);
      }
    }
  }

  // Min-fill elimination; ties by degree, then by index.
  std::vector<char> eliminated(k, 0);
  std::vector<std::vector<int>> cliques;
  for (int step = 0; step < k; ++step) {
    int pick = -1;
    long best_fill = 0;
    std::size_t best_degree = 0;
    for (int v = 0; v < k; ++v) {
      if (eliminated[v]) continue;
      long fill = 0;
      for (auto a = adj[v].begin(); a != adj[v].end(); ++a) {
        for (auto b = std::next(a); b != adj[v].end(); ++b) {
          if (!adj[*a].count(*b)) ++fill;
        }
      }
      if (pick < 0 || fill < best_fill ||
          (fill == best_fill && adj[v].size() < best_degree)) {
        pick = v;
        best_fill = fill;
        best_degree = adj[v].size();
      }
    }
    std::vector<int> bag(adj[pick].begin(), adj[pick].end());
    bag.push_back(pick);
    std::sort(bag.begin(), bag.end());
    if (static_cast<int>(bag.size()) - 1 > width_cap) {
      throw TreewidthError("junction tree: width " +
                           std::to_string(bag.size() - 1) + " exceeds cap " +
                           std::to_string(width_cap));
    }
    cliques.push_back(bag);
    for (int a : adj[pick]) {
      for (int b : adj[pick]) {
        if (a != b) adj[a].insert(b);
      }
    }
    for (int a : adj[pick]) adj[a].erase(pick);
    adj[pick].clear();
    eliminated[pick] = 1;
  }

  // Keep maximal cliques only.
  JunctionTree jt;
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    bool dominated = false;
    for (std::size_t d = 0; d < cliques.size() && !dominated; ++d) {
      if (c == d) continue;
      if (subset_of(cliques[c], cliques[d]) &&
          (cliques[c].size() < cliques[d].size() || d < c)) {
        dominated = true;
      }
    }
    if (!dominated) jt.bags.push_back(cliques[c]);
  }

  // Maximum spanning tree on intersection sizes (Kruskal).
  const int nb = static_cast<int>(jt.bags.size());
  struct Cand {
    int w, a, b;
  };
  std::vector<Cand> cands;
  for (int a = 0; a < nb; ++a) {
    for (int b = a + 1; b < nb; ++b) {
      cands.push_back({intersection_size(jt.bags[a], jt.bags[b]), a, b});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& x, const Cand& y) { return x.w > y.w; });
  std::vector<int> parent(nb);
  std::iota(parent.begin(), parent.end(), 0);
  for (const Cand& c : cands) {
    const int ra = find_root(parent, c.a);
    const int rb = find_root(parent, c.b);
    if (ra == rb) continue;
    parent[ra] = rb;
    jt.edges.emplace_back(c.a, c.b);
  }

  for (const auto& s : scopes) {
    std::vector<int> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    int host = -1;
    for (int b = 0; b < nb && host < 0; ++b) {
      if (subset_of(sorted, jt.bags[b])) host = b;
    }
    if (host < 0) throw Error("junction tree: scope not covered by any bag");
    jt.factor_bag.push_back(host);
  }
  jt.variable_bag.assign(k, -1);
  for (int b = 0; b < nb; ++b) {
    for (int v : jt.bags[b]) {
      if (jt.variable_bag[v] < 0) jt.variable_bag[v] = b;
    }
    jt.width = std::max(jt.width, static_cast<int>(jt.bags[b].size()) - 1);
  }
  if (!verify_junction_tree(jt, scopes, k)) {
    throw Error("junction tree: running intersection check failed");
  }
  return jt;
}

bool verify_junction_tree(const JunctionTree& jt,
                          const std::vector<std::vector<int>>& scopes, int k) {
  const int nb = static_cast<int>(jt.bags.size());
  if (nb == 0 || static_cast<int>(jt.edges.size()) != nb - 1) return false;
  std::vector<std::vector<int>> nbr(nb);
  for (auto [a, b] : jt.edges) {
    if (a < 0 || b < 0 || a >= nb || b >= nb) return false;
    nbr[a].push_back(b);
    nbr[b].push_back(a);
  }
  // Connected with nb-1 edges means a tree.
  std::vector<char> seen(nb, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int w : nbr[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  if (count != nb) return false;

  for (int v = 0; v < k; ++v) {
    std::vector<char> has(nb, 0);
    int first = -1;
    int total = 0;
    for (int b = 0; b < nb; ++b) {
      if (std::binary_search(jt.bags[b].begin(), jt.bags[b].end(), v)) {
        has[b] = 1;
        ++total;
        if (first < 0) first = b;
      }
    }
    if (total == 0) return false;
    std::vector<char> reach(nb, 0);
    std::vector<int> st = {first};
    reach[first] = 1;
    int got = 1;
    while (!st.empty()) {
      const int u = st.back();
      st.pop_back();
      for (int w : nbr[u]) {
        if (has[w] && !reach[w]) {
          reach[w] = 1;
          ++got;
          st.push_back(w);
        }
      }
    }
    if (got != total) return false;
  }
  for (const auto& s : scopes) {
    std::vector<int> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    bool covered = false;
    for (int b = 0; b < nb && !covered; ++b) covered = subset_of(sorted, jt.bags[b]);
    if (!covered) return false;
  }
  return true;
}

}  // namespace motkit
