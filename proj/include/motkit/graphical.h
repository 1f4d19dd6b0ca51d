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

#ifndef MOTKIT_GRAPHICAL_H_
#define MOTKIT_GRAPHICAL_H_

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "motkit/core.h"
#include "motkit/oracles.h"

namespace motkit {

inline constexpr int kDefaultWidthCap = 6;

// f_S over the sorted scope S, tabulated row-major over [n]^|S|.
struct Factor {
  std::vector<int> scope;
  Vec table;
};

struct JunctionTree {
  std::vector<std::vector<int>> bags;
  std::vector<std::pair<int, int>> edges;
  // Bag index holding each factor, in factor order.
  std::vector<int> factor_bag;
  // Bag that carries the unary term of each variable.
  std::vector<int> variable_bag;
  int width = 0;
};

// Min-fill elimination, clique extraction and a maximum-weight spanning tree
// over bag intersections. Variables absent from every scope get their own
// bag. Throws TreewidthError when the width exceeds `width_cap`.
JunctionTree build_junction_tree(const std::vector<std::vector<int>>& scopes,
                                 int k, int width_cap = kDefaultWidthCap);

// Running intersection, scope coverage and tree shape.
bool verify_junction_tree(const JunctionTree& jt,
                          const std::vector<std::vector<int>>& scopes, int k);

// C(j) = sum_S f_S(j_S).
class GraphicalCost {
 public:
  GraphicalCost(int n, int k, std::vector<Factor> factors,
                int width_cap = kDefaultWidthCap);

  int n() const { return n_; }
  int k() const { return k_; }
  double cmax() const { return cmax_; }
  const std::vector<Factor>& factors() const { return factors_; }
  const JunctionTree& junction_tree() const { return jt_; }
  double evaluate(const Tuple& t) const;

  // Precomputed layout of one bag for message passing.
  struct BagData {
    std::vector<int> vars;
    // Sum of the factors assigned to the bag, row-major over `vars`.
    Vec base;
    // Variables whose unary term is carried by this bag.
    std::vector<int> unary_vars;
    std::vector<int> nbrs;
    // For each neighbour: bag entry -> separator entry.
    std::vector<std::vector<std::uint32_t>> sep_index;
    std::vector<std::size_t> sep_size;
  };
  const std::vector<BagData>& bags() const { return bags_; }

 private:
  int n_;
  int k_;
  double cmax_;
  std::vector<Factor> factors_;
  JunctionTree jt_;
  std::vector<BagData> bags_;
};

// Exact MIN/ARGMIN by min-sum message passing. Ties go to the
// lexicographically smallest tuple.
OracleAnswerArg gm_mode(const GraphicalCost& gc, const DualWeights& p);

// Exact SMIN by log-domain sum-product. Weights may be -inf.
double gm_logpartition(const GraphicalCost& gc, const DualWeights& p,
                       double eta);

// StructuredCost exposing MIN, ARGMIN and SMIN (plus derived oracles).
StructuredCost make_graphical_cost(std::shared_ptr<const GraphicalCost> gc);

}  // namespace motkit

#endif  // MOTKIT_GRAPHICAL_H_
