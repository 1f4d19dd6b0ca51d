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

#ifndef MOTKIT_SETOPT_H_
#define MOTKIT_SETOPT_H_

#include <functional>
#include <utility>
#include <vector>

#include "motkit/core.h"
#include "motkit/oracles.h"

namespace motkit {

// Oracles over a set S of tuples. MIN_S(p) = min over j in S of
// -sum_i p_i[j_i]; AMIN_S answers within eps; SMIN_S is the softmin of the
// same objective over S. An empty S makes MIN_S return +inf.
struct SetOracle {
  using MinFn = std::function<double(const DualWeights&)>;
  using AMinFn = std::function<double(const DualWeights&, double eps)>;
  using SMinFn = std::function<double(const DualWeights&, double eta)>;
  using ContainsFn = std::function<bool(const Tuple&)>;

  int n = 0;
  int k = 0;
  MinFn min;
  AMinFn amin;
  SMinFn smin;
  // Membership test, used only to evaluate C at a tuple.
  ContainsFn contains;
};

// MIN_C for C = 1[j not in S]. With an AMIN_S answer in place of MIN_S the
// same formula answers AMIN_C.
double setopt_combine_min(double a, const DualWeights& p);
double setopt_min(const SetOracle& s, const DualWeights& p);
double setopt_amin(const SetOracle& s, const DualWeights& p, double eps);
// SMIN_C from SMIN_S, evaluated in the log domain. Weights may be -inf.
double setopt_smin(const SetOracle& s, const DualWeights& p, double eta);

// StructuredCost for C = 1[j not in S] with cmax = 1. Capabilities follow
// the set oracles present in `s`.
StructuredCost make_setopt_cost(SetOracle s);

// Set oracle for an explicitly listed S (tests and small problem files).
SetOracle make_explicit_set_oracle(int n, int k, std::vector<Tuple> members);

struct UEdge {
  int u;
  int v;
};

// Undirected multigraph on vertices 0..vertices-1. Edge ids are positions in
// `edges`.
struct UGraph {
  int vertices = 0;
  std::vector<UEdge> edges;
};

void validate_graph(const UGraph& g);
// Connectivity of (V, H) where H holds the edges with keep[e] != 0. An empty
// `keep` means all edges.
bool is_connected(const UGraph& g, const std::vector<char>& keep = {});

struct SubgraphAnswer {
  double value = 0.0;
  std::vector<char> edges;
};

// Minimum of sum_{e in H} x_e over spanning edge sets H with (V, H)
// connected. Throws InfeasibleError when g is disconnected.
SubgraphAnswer min_weight_connected_subgraph(const UGraph& g, const Vec& x);

// Minimum of sum_{e in H} x_e over edge sets H with (V, H) disconnected.
// Throws InfeasibleError when g has fewer than two vertices.
SubgraphAnswer min_weight_disconnected_subgraph(const UGraph& g, const Vec& x);

struct MinCut {
  double value = 0.0;
  // side[v] != 0 for the vertices on one shore.
  std::vector<char> side;
};

// Global minimum cut with nonnegative weights. A disconnected graph yields
// value 0 with one component as the shore.
MinCut stoer_wagner_mincut(const UGraph& g, const Vec& w);

}  // namespace motkit

#endif  // MOTKIT_SETOPT_H_
