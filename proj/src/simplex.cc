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

#include "motkit/simplex.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace motkit {

RevisedSimplex::RevisedSimplex(Vec b, SimplexOptions options)
    : m_(static_cast<int>(b.size())), b_(std::move(b)), options_(options) {
  if (m_ < 1) throw InvalidArgument("simplex: need at least one row");
  row_sign_.assign(m_, 1.0);
  for (int r = 0; r < m_; ++r) {
    if (!std::isfinite(b_[r])) throw InvalidArgument("simplex: b not finite");
    if (b_[r] < 0) {
      row_sign_[r] = -1.0;
      b_[r] = -b_[r];
    }
  }
  // One artificial column per row forms the initial basis.
  for (int r = 0; r < m_; ++r) {
    cols_.push_back({SparseColumn{{r}, {1.0}}, 0.0, true});
    basis_.push_back(r);
    is_basic_.push_back(1);
  }
  binv_ = Eigen::MatrixXd::Identity(m_, m_);
  x_basic_ = b_;
  b_true_ = b_;
}

int RevisedSimplex::add_column(SparseColumn column, double cost) {
  if (column.rows.size() != column.values.size()) {
    throw InvalidArgument("simplex: column rows/values length mismatch");
  }
  if (!std::isfinite(cost)) throw InvalidArgument("simplex: cost not finite");
  for (std::size_t e = 0; e < column.rows.size(); ++e) {
    const int r = column.rows[e];
    if (r < 0 || r >= m_) throw InvalidArgument("simplex: row out of range");
    column.values[e] *= row_sign_[r];
  }
  cols_.push_back({std::move(column), cost, false});
  is_basic_.push_back(0);
  return columns() - 1;
}

double RevisedSimplex::phase_cost(int j) const {
  if (phase_one_) return cols_[j].artificial ? 1.0 : 0.0;
  return cols_[j].artificial ? 0.0 : cols_[j].cost;
}

void RevisedSimplex::refactor() {
  Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(m_, m_);
  for (int r = 0; r < m_; ++r) {
    const SparseColumn& a = cols_[basis_[r]].a;
    for (std::size_t e = 0; e < a.rows.size(); ++e) {
      basis_matrix(a.rows[e], r) = a.values[e];
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
  binv_ = lu.inverse();
  if (!binv_.allFinite()) throw PrecisionError("simplex: basis matrix became singular");
  for (int r = 0; r < m_; ++r) {
    double v = 0.0;
    for (int s = 0; s < m_; ++s) v += binv_(r, s) * b_[s];
    x_basic_[r] = std::abs(v) < options_.feasibility_tol ? 0.0 : v;
  }
  pivots_since_refactor_ = 0;
}

Vec RevisedSimplex::compute_duals() const {
  // y^T = c_B^T B^{-1}.
  Vec y(m_, 0.0);
  for (int r = 0; r < m_; ++r) {
    const double cb = phase_cost(basis_[r]);
    if (cb == 0.0) continue;
    for (int s = 0; s < m_; ++s) y[s] += cb * binv_(r, s);
  }
  return y;
}

Vec RevisedSimplex::column_image(int j) const {
  Vec d(m_, 0.0);
  const SparseColumn& a = cols_[j].a;
  for (std::size_t e = 0; e < a.rows.size(); ++e) {
    const int s = a.rows[e];
    const double v = a.values[e];
    for (int r = 0; r < m_; ++r) d[r] += binv_(r, s) * v;
  }
  return d;
}

bool RevisedSimplex::iterate(long& iterations, long cap) {
  int degenerate_run = 0;
  const int total = static_cast<int>(cols_.size());
  while (true) {
    if (iterations >= cap) {
      throw ConvergenceError("simplex: iteration cap " + std::to_string(cap) +
                             " reached (numerical stall)");
    }
    const Vec y = compute_duals();
    int entering = -1;
    double best_rc = -options_.optimality_tol;
    for (int j = 0; j < total; ++j) {
      if (is_basic_[j]) continue;
      if (!phase_one_ && cols_[j].artificial) continue;
      double rc = phase_cost(j);
      const SparseColumn& a = cols_[j].a;
      for (std::size_t e = 0; e < a.rows.size(); ++e) {
        rc -= y[a.rows[e]] * a.values[e];
      }
      if (rc < best_rc) {
        best_rc = rc;
        entering = j;
        if (bland_) break;
      }
    }
    if (entering < 0) return true;

    const Vec d = column_image(entering);
    double dmax = 1.0;
    for (double v : d) dmax = std::max(dmax, std::abs(v));
    // An artificial left at zero sits on a redundant row when its entry is
    // round-off; pivoting on that would make the basis singular.
    const double artificial_tol = options_.artificial_pivot_tol * dmax;
    const double piv_tol = std::max(options_.pivot_tol, options_.relative_pivot_tol * dmax);
    const auto zero_artificial = [&](int r) {
      return !phase_one_ && cols_[basis_[r]].artificial && std::abs(d[r]) > artificial_tol;
    };
    const auto eligible = [&](int r) { return zero_artificial(r) || d[r] > piv_tol; };
    const auto ratio = [&](int r) {
      return zero_artificial(r) ? 0.0 : std::max(0.0, x_basic_[r]) / d[r];
    };
    // Two-pass ratio test. Dantzig pricing bounds the step with slightly
    // relaxed bounds and takes the largest pivot within it. Bland's rule
    // keeps the exact minimum ratio, since the relaxation can cycle, and
    // takes the lowest basis index among ties.
    double bound = kInf;
    for (int r = 0; r < m_; ++r) {
      if (!eligible(r)) continue;
      const double x = std::max(0.0, x_basic_[r]) + (bland_ ? 0.0 : options_.feasibility_tol);
      bound = std::min(bound, zero_artificial(r) ? 0.0 : x / d[r]);
    }
    if (bland_) bound += options_.feasibility_tol;
    int leave = -1;
    for (int r = 0; r < m_; ++r) {
      if (!eligible(r) || ratio(r) > bound) continue;
      if (leave < 0) {
        leave = r;
      } else if (bland_ ? basis_[r] < basis_[leave] : std::abs(d[r]) > std::abs(d[leave])) {
        leave = r;
      }
    }
    if (leave < 0) return false;

    const double theta = ratio(leave);
    pivot(entering, leave, d, theta);
    ++iterations;

    if (theta <= options_.feasibility_tol) {
      if (++degenerate_run >= options_.degenerate_run_limit &&
          options_.rule == PricingRule::kDantzigThenBland && !bland_) {
        if (shift_rounds_ < options_.max_shift_rounds) {
          shift_degenerate_rows();
        } else {
          bland_ = true;
        }
        degenerate_run = 0;
      }
    } else {
      degenerate_run = 0;
    }
  }
}

void RevisedSimplex::pivot(int entering, int leave, const Vec& d, double theta) {
  for (int r = 0; r < m_; ++r) {
    if (r == leave) continue;
    x_basic_[r] -= theta * d[r];
    if (std::abs(x_basic_[r]) < options_.feasibility_tol * 1e-3) {
      x_basic_[r] = 0.0;
    }
  }
  x_basic_[leave] = theta;
  const double piv = d[leave];
  binv_.row(leave) /= piv;
  for (int r = 0; r < m_; ++r) {
    if (r == leave || d[r] == 0.0) continue;
    binv_.row(r) -= d[r] * binv_.row(leave);
  }
  is_basic_[basis_[leave]] = 0;
  basis_[leave] = entering;
  is_basic_[entering] = 1;
  if (++pivots_since_refactor_ >= options_.refactor_every) refactor();
}

void RevisedSimplex::shift_degenerate_rows() {
  ++shift_rounds_;
  double scale = 1.0;
  for (double v : b_true_) scale = std::max(scale, std::abs(v));
  for (int r = 0; r < m_; ++r) {
    if (x_basic_[r] > options_.feasibility_tol) continue;
    // splitmix64 keeps the shifts reproducible across runs.
    std::uint64_t z = (shift_state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
    const double delta = (1.0 + u) * options_.shift_scale * scale;
    // Raising basic value r by delta is b += delta * (column of that basic).
    const SparseColumn& a = cols_[basis_[r]].a;
    for (std::size_t e = 0; e < a.rows.size(); ++e) b_[a.rows[e]] += delta * a.values[e];
    x_basic_[r] += delta;
  }
  shifted_ = true;
}

bool RevisedSimplex::remove_shifts(long& iterations, long cap) {
  if (!shifted_) return true;
  b_ = b_true_;
  shifted_ = false;
  refactor();
  while (true) {
    int leave = -1;
    double worst = -options_.feasibility_tol;
    for (int r = 0; r < m_; ++r) {
      if (x_basic_[r] < worst) {
        worst = x_basic_[r];
        leave = r;
      }
    }
    if (leave < 0) return true;
    if (iterations >= cap) {
      throw ConvergenceError("simplex: iteration cap " + std::to_string(cap) +
                             " reached while removing shifts");
    }
    // Dual ratio test over the row of B^{-1} A for the leaving row.
    const Vec y = compute_duals();
    int entering = -1;
    double best_ratio = kInf;
    double best_alpha = 0.0;
    for (int j = 0; j < static_cast<int>(cols_.size()); ++j) {
      if (is_basic_[j]) continue;
      if (!phase_one_ && cols_[j].artificial) continue;
      const SparseColumn& a = cols_[j].a;
      double alpha = 0.0;
      double rc = phase_cost(j);
      for (std::size_t e = 0; e < a.rows.size(); ++e) {
        alpha += binv_(leave, a.rows[e]) * a.values[e];
        rc -= y[a.rows[e]] * a.values[e];
      }
      if (alpha >= -options_.pivot_tol) continue;
      const double ratio = std::max(0.0, rc) / -alpha;
      if (ratio < best_ratio - options_.optimality_tol ||
          (ratio <= best_ratio + options_.optimality_tol && -alpha > best_alpha)) {
        best_ratio = std::min(best_ratio, ratio);
        best_alpha = -alpha;
        entering = j;
      }
    }
    if (entering < 0) return false;
    const Vec d = column_image(entering);
    pivot(entering, leave, d, x_basic_[leave] / d[leave]);
    ++iterations;
  }
}

LpSolution RevisedSimplex::solve() {
  const long n_total = static_cast<long>(cols_.size());
  const long cap = options_.max_iterations > 0 ? options_.max_iterations
                                               : 50L * (m_ + n_total);
  bland_ = options_.rule == PricingRule::kBland;
  shift_rounds_ = 0;
  long iterations = 0;
  LpSolution sol;
  if (!feasible_basis_) {
    phase_one_ = true;
    iterate(iterations, cap);
    remove_shifts(iterations, cap);
    refactor();
    double infeasibility = 0.0;
    double scale = 1.0;
    for (int r = 0; r < m_; ++r) {
      if (cols_[basis_[r]].artificial) infeasibility += x_basic_[r];
      scale += b_[r];
    }
    if (infeasibility > 1e-8 * scale) {
      sol.status = LpStatus::kInfeasible;
      sol.iterations = iterations;
      return sol;
    }
    feasible_basis_ = true;
    phase_one_ = false;
  }
  bland_ = options_.rule == PricingRule::kBland;
  // Dual pivots that remove shifts can leave negative reduced costs behind
  // once round-off is involved; alternate until both hold.
  bool bounded = true;
  for (int round = 0;; ++round) {
    bounded = iterate(iterations, cap);
    if (!bounded) break;
    if (!shifted_) break;
    if (!remove_shifts(iterations, cap)) {
      throw PrecisionError("simplex: could not restore feasibility after shifting");
    }
    if (round >= 10) {
      bland_ = true;
      shift_rounds_ = options_.max_shift_rounds;
    }
  }
  refactor();
  sol.iterations = iterations;
  if (!bounded) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }
  sol.status = LpStatus::kOptimal;
  sol.x.assign(columns(), 0.0);
  for (int r = 0; r < m_; ++r) {
    const int j = basis_[r];
    if (cols_[j].artificial) continue;
    sol.x[j - m_] = std::max(0.0, x_basic_[r]);
    sol.basis.push_back(j - m_);
  }
  std::sort(sol.basis.begin(), sol.basis.end());
  sol.value = 0.0;
  for (int j = 0; j < columns(); ++j) sol.value += cols_[j + m_].cost * sol.x[j];
  sol.duals = compute_duals();
  for (int r = 0; r < m_; ++r) sol.duals[r] *= row_sign_[r];
  return sol;
}

LpSolution lp_solve(const StandardFormLP& lp, const SimplexOptions& options) {
  const int m = static_cast<int>(lp.A.rows());
  const int n = static_cast<int>(lp.A.cols());
  if (static_cast<int>(lp.b.size()) != m || static_cast<int>(lp.c.size()) != n) {
    throw InvalidArgument("lp_solve: inconsistent dimensions");
  }
  if (n > 100000 || m > 10000) throw InvalidArgument("lp_solve: LP too large");
  RevisedSimplex solver(lp.b, options);
  for (int j = 0; j < n; ++j) {
    SparseColumn col;
    for (int r = 0; r < m; ++r) {
      if (lp.A(r, j) != 0.0) {
        col.rows.push_back(r);
        col.values.push_back(lp.A(r, j));
      }
    }
    solver.add_column(std::move(col), lp.c[j]);
  }
  return solver.solve();
}

std::pair<double, SparsePlan> brute_force_mot(const DenseTensor& t,
                                              const Marginals& m) {
  if (t.n() != m.n() || t.k() != m.k()) {
    throw InvalidArgument("brute_force_mot: dimension mismatch");
  }
  const int n = t.n();
  const int k = t.k();
  Vec b;
  for (int i = 0; i < k; ++i) b.insert(b.end(), m[i].begin(), m[i].end());
  RevisedSimplex solver(b);
  Tuple j(k, 0);
  std::size_t idx = 0;
  do {
    SparseColumn col;
    for (int i = 0; i < k; ++i) {
      col.rows.push_back(i * n + j[i]);
      col.values.push_back(1.0);
    }
    solver.add_column(std::move(col), t.values()[idx++]);
  } while (next_tuple(j, n));
  const LpSolution sol = solver.solve();
  if (sol.status != LpStatus::kOptimal) {
    throw Error("brute_force_mot: LP not optimal (invalid marginals?)");
  }
  SparsePlan plan(n, k);
  for (int c : sol.basis) {
    if (sol.x[c] > 0) plan.add(tuple_from_index(c, n, k), sol.x[c]);
  }
  return {sol.value, plan};
}

}  // namespace motkit
