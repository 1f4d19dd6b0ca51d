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

#ifndef MOTKIT_SIMPLEX_H_
#define MOTKIT_SIMPLEX_H_

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "motkit/core.h"

namespace motkit {

// min c^T x  s.t.  A x = b, x >= 0.
struct StandardFormLP {
  Eigen::MatrixXd A;
  Vec b;
  Vec c;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  Vec x;
  double value = 0.0;
  // Basic structural columns (artificial columns left at zero are omitted).
  std::vector<int> basis;
  Vec duals;
  LpStatus status = LpStatus::kOptimal;
  long iterations = 0;
};

enum class PricingRule {
  // Smallest-index entering and leaving variables throughout.
  kBland,
  // Most negative reduced cost. A run of degenerate pivots shifts the
  // degenerate rows' right-hand sides by small random amounts; once the
  // shift rounds are used up it switches to Bland's rule for the rest of
  // the solve, which keeps termination guaranteed.
  kDantzigThenBland,
};

struct SimplexOptions {
  PricingRule rule = PricingRule::kDantzigThenBland;
  int degenerate_run_limit = 50;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  // Pivots must also exceed this times the largest entry of the column.
  double relative_pivot_tol = 1e-7;
  // Minimum |pivot| relative to the entering column for removing an
  // artificial variable at zero level in phase two.
  double artificial_pivot_tol = 1e-7;
  // Random right-hand-side shifts are drawn from [1, 2] * shift_scale; at
  // most max_shift_rounds rounds per solve.
  double shift_scale = 1e-7;
  int max_shift_rounds = 20;
  int refactor_every = 64;
  // 0 means the default cap 50 * (m + N).
  long max_iterations = 0;
};

struct SparseColumn {
  std::vector<int> rows;
  Vec values;
};

// Two-phase primal revised simplex over an explicit basis inverse. Columns
// may be appended between solves; later solves restart phase 2 from the
// previous optimal basis.
class RevisedSimplex {
 public:
  RevisedSimplex(Vec b, SimplexOptions options = {});

  int rows() const { return m_; }
  int columns() const { return static_cast<int>(cols_.size()) - m_; }
  // Returns the index of the new column.
  int add_column(SparseColumn column, double cost);
  LpSolution solve();

 private:
  struct Column {
    SparseColumn a;
    double cost;
    bool artificial;
  };

  double phase_cost(int j) const;
  void refactor();
  Vec compute_duals() const;
  Vec column_image(int j) const;
  // Runs the simplex loop for the current phase. Returns false on
  // unboundedness.
  bool iterate(long& iterations, long cap);
  // Basis change with entering column image d and step theta.
  void pivot(int entering, int leave, const Vec& d, double theta);
  // Shifts the right-hand side of the rows whose basic value is at zero.
  void shift_degenerate_rows();
  // Restores the unshifted right-hand side and removes the resulting
  // primal infeasibility with dual simplex pivots. Returns false when no
  // pivot can repair a row.
  bool remove_shifts(long& iterations, long cap);

  int m_;
  Vec b_;
  // Right-hand side before shifting (b_ is the working copy).
  Vec b_true_;
  bool shifted_ = false;
  int shift_rounds_ = 0;
  std::uint64_t shift_state_ = 0x9e3779b97f4a7c15ULL;
  Vec row_sign_;
  SimplexOptions options_;
  std::vector<Column> cols_;
  std::vector<int> basis_;
  std::vector<char> is_basic_;
  Eigen::MatrixXd binv_;
  Vec x_basic_;
  bool phase_one_ = true;
  bool feasible_basis_ = false;
  bool bland_ = false;
  int pivots_since_refactor_ = 0;
};

LpSolution lp_solve(const StandardFormLP& lp, const SimplexOptions& options = {});

// Exact MOT optimum by solving the full n^k-column LP.
std::pair<double, SparsePlan> brute_force_mot(const DenseTensor& t,
                                              const Marginals& m);

}  // namespace motkit

#endif  // MOTKIT_SIMPLEX_H_
