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

#ifndef MOTKIT_APPS_H_
#define MOTKIT_APPS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "motkit/algorithms.h"
#include "motkit/core.h"
#include "motkit/graphical.h"
#include "motkit/lowrank.h"
#include "motkit/setopt.h"

namespace motkit {

enum class Engine { kSinkhorn, kMwu, kColgen };

std::string engine_name(Engine e);
// Parses "sinkhorn", "mwu" or "colgen".
Engine parse_engine(const std::string& s);

// ------------------------------------------------------------- Euler flows

// Particles on points x_0..x_{n-1} in R^d move through k time steps; the
// particle starting at x_j must end at sigma(x_j). `sigma_points[j]` holds
// sigma(x_j), which need not be one of the grid points.
struct EulerFlowProblem {
  std::vector<Vec> points;
  std::vector<Vec> sigma_points;
  int k = 0;

  int n() const { return static_cast<int>(points.size()); }
};

// Grid x_j = j / (n - 1) on [0, 1] with sigma given by a named map
// ("identity", "shift-half", "double-cover", "reverse") or by an explicit
// comma-separated permutation of 0..n-1 ("2,0,1").
EulerFlowProblem make_grid_euler_flow(int n, int k, const std::string& sigma_spec);

// Validates shapes and finiteness. Named maps such as double-cover are not
// bijections of the grid, so bijectivity is only enforced for explicit
// permutations.
void validate_euler_flow(const EulerFlowProblem& pr);

// Cycle-structured cost: ||x_{j_{t+1}} - x_{j_t}||^2 for consecutive steps
// and ||sigma(x_{j_0}) - x_{j_{k-1}}||^2 closing the cycle.
std::shared_ptr<const GraphicalCost> build_euler_flow_cost(const EulerFlowProblem& pr);

// Direct evaluation of the cost at a tuple.
double euler_flow_cost_at(const EulerFlowProblem& pr, const Tuple& t);

struct TransportRow {
  int t;
  int j_from;
  int j_to;
  double mass;
};

// Pairwise maps (t, t+1) for t = 1..k-1 plus the closing map (k, 1) as row
// t = k, with 1-based time labels. Rows with mass <= threshold are dropped.
std::vector<TransportRow> trajectory_rows(const SparsePlan& plan, double threshold = 0.0);
std::vector<TransportRow> trajectory_rows(const ScaledPlan& plan, double threshold = 1e-12);

// CSV with header "t,j_from,j_to,mass".
std::string trajectory_csv(const std::vector<TransportRow>& rows);

struct EngineOptions {
  std::uint64_t seed = 1;
  // 0 keeps each engine's default.
  long max_iters = 0;
};

SolveReport solve_euler_flow(const EulerFlowProblem& pr, Engine engine, double eps,
                             const EngineOptions& options = {});

// ---------------------------------------------------------------- reliability

enum class ReliabilityMode { kWorst, kBest };

std::string mode_name(ReliabilityMode m);
ReliabilityMode parse_mode(const std::string& s);

// Edge e survives with probability q[e]. Coordinate e of a tuple is 1 when
// the edge is present and 0 when it has failed.
struct ReliabilityProblem {
  UGraph graph;
  Vec q;
  ReliabilityMode mode = ReliabilityMode::kWorst;
};

void validate_reliability(const ReliabilityProblem& pr);

// Marginals (1 - q_e, q_e) for every edge.
Marginals reliability_marginals(const ReliabilityProblem& pr);

// Set oracle over the edge states whose present edges connect the graph
// (connected = true) or leave it disconnected (connected = false). Weights
// equal to -inf force an edge state off.
SetOracle connected_set_oracle(const UGraph& g);
SetOracle disconnected_set_oracle(const UGraph& g);

// Best case: C = 1[H disconnected]. Worst case: C = 1[H connected].
// In both modes the probability of connectivity is obtained from the MOT
// value (1 - value for best, value for worst).
StructuredCost build_reliability_cost(const ReliabilityProblem& pr);

struct ReliabilityResult {
  ReliabilityMode mode;
  double probability = 0.0;
  SolveReport report;
};

ReliabilityResult network_reliability(const ReliabilityProblem& pr, Engine engine,
                                      double eps, const EngineOptions& options = {},
                                      const MwuOptions& mwu = {});

// Probability of connectivity when edges fail independently, by enumeration
// over all 2^|E| edge states. Throws CapExceeded above the brute-force cap.
double independent_reliability(const ReliabilityProblem& pr);

// ---------------------------------------------------------------------- risk

// r stocks over k years. returns[l][i] lists the atom values of the gross
// return of stock l in year i, probs[l][i] their probabilities. Coordinate
// l * k + i of a tuple selects the atom for (stock l, year i).
struct RiskProblem {
  int r = 0;
  int k = 0;
  std::vector<std::vector<Vec>> returns;
  std::vector<std::vector<Vec>> probs;
};

void validate_risk(const RiskProblem& pr);

// Number of atoms per coordinate (the largest listed; shorter lists are
// padded with unit-valued atoms of probability 0).
int risk_atoms(const RiskProblem& pr);
Marginals risk_marginals(const RiskProblem& pr);

// Total return sum_l prod_i returns[l][i][j_{l k + i}] as a rank-r tensor.
std::shared_ptr<const LowRankPlusSparseCost> build_risk_cost(const RiskProblem& pr);

// Smallest and largest achievable total return.
double risk_min_total(const RiskProblem& pr);
double risk_max_total(const RiskProblem& pr);

struct RiskResult {
  double value = 0.0;
  double value_stderr = 0.0;
  SolveReport report;
};

// Smallest expected total return over couplings of the marginals, within
// eps. `value` is the true cost of the returned plan.
RiskResult worst_case_profit(const RiskProblem& pr, Engine engine, double eps,
                             const EngineOptions& options = {});

// ---------------------------------------------------------------- projection

struct ProjectionProblem {
  LowRankFactors r;
  SparseComponent s;
  Marginals marginals;
  double eps = 0.1;
};

struct ProjectionOptions {
  // Tuples checked for Q >= 0 when Q is too large to enumerate.
  std::size_t audit_samples = 10000;
  std::uint64_t seed = 1;
  // Frank-Wolfe steps; 0 uses ceil(8 / eps).
  long iterations = 0;
  // Inner MWU solves for the Frank-Wolfe steps. The iterates only need a
  // good descent direction, so these run at the plain eps / (2 cmax)
  // feasibility accuracy.
  MwuOptions mwu = [] {
    MwuOptions o;
    o.eps_scale = 1.0;
    return o;
  }();
  // Inner MWU solve for the final gap certificate, whose lower bound
  // tightens with the feasibility accuracy.
  MwuOptions certificate_mwu;
};

struct ProjectionResult {
  SparsePlan plan;
  // ||P - Q||^2 for the returned plan.
  double objective = 0.0;
  // <P - D, grad> with D the last linear-minimization answer.
  double gap = 0.0;
  // Certified upper bound on objective - min over the polytope, from the
  // lower bound of the last linear subproblem.
  double gap_bound = 0.0;
  long iterations = 0;
  long lp_iterations = 0;
};

void validate_projection(const ProjectionProblem& pr,
                         const ProjectionOptions& options = {});

// ||Q||^2 for Q = R + S.
double squared_norm(const LowRankFactors& r, const SparseComponent& s);

// ||P - Q||^2.
double projection_objective(const SparsePlan& p, const LowRankFactors& r,
                            const SparseComponent& s);

ProjectionResult fw_project(const ProjectionProblem& pr,
                            const ProjectionOptions& options = {});

}  // namespace motkit

#endif  // MOTKIT_APPS_H_
