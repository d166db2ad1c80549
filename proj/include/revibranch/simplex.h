// Copyright 2026 The ReviBranch Authors
//
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

#ifndef REVIBRANCH_SIMPLEX_H_
#define REVIBRANCH_SIMPLEX_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "revibranch/milp.h"

namespace revibranch {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kNumericallyUnstable };

std::string to_string(LpStatus status);

enum class BasisStatus : uint8_t { kBasic, kAtLower, kAtUpper, kFree };

// Status of every column: structurals 0..n-1 followed by one slack per row.
struct Basis {
  std::vector<BasisStatus> status;
  bool operator==(const Basis&) const = default;
};

struct LpSolution {
  LpStatus status = LpStatus::kNumericallyUnstable;
  std::vector<double> values;  // x*, length n0
  double objective_value = 0.0;
  int64_t iterations = 0;  // simplex pivots, bound flips included
  std::vector<double> reduced_costs;  // length n0
  std::vector<double> duals;          // length m, <= 0 at optimality
  std::vector<double> slacks;         // b - A x*, length m
  Basis basis;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

// LP relaxation of an instance with node-local bounds. Local bounds only
// ever tighten the instance bounds.
struct LpProblem {
  const MilpInstance* instance = nullptr;
  std::vector<double> lower;
  std::vector<double> upper;
  bool infeasible_by_bounds = false;

  static LpProblem root(const MilpInstance& instance);
};

enum class BranchDirection { kDown, kUp };

// Child problem for branching on `var` at fractional LP value `value`:
// down sets u'_var = floor(value), up sets l'_var = ceil(value). Crossing
// bounds mark the child infeasible_by_bounds. The parent is not modified.
LpProblem tighten_bound(const LpProblem& parent, int var,
                        BranchDirection direction, double value);

struct SimplexOptions {
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  int refactor_period = 50;
  // Bland's rule takes over after this many degenerate pivots per (m + n);
  // the total budget is degenerate_factor * (m + n).
  int degenerate_factor = 10;
  int64_t max_iterations = 0;  // 0 selects 200 * (m + n) + 10000
};

// Dense bounded-variable primal simplex. Row i of the instance becomes
// A_i x + s_i = b_i with s_i >= 0. Phase 1 minimizes the sum of basic bound
// violations from whatever basis it starts in, so cold starts (all-slack
// basis) and warm starts share one code path.
//
// One solver per thread; the solver caches the instance's columns.
class SimplexSolver {
 public:
  explicit SimplexSolver(const MilpInstance& instance,
                         SimplexOptions options = {});

  LpSolution solve(const LpProblem& problem, const Basis* warm_basis = nullptr);

  const MilpInstance& instance() const { return instance_; }

 private:
  enum class Phase { kFeasibility, kOptimality };

  void initialize(const LpProblem& problem, const Basis* warm_basis);
  void slack_basis();
  bool refactor();
  void compute_basic_values();
  void column(int j, Eigen::VectorXd& out) const;
  double column_dot(int j, const Eigen::VectorXd& y) const;
  double infeasibility(int row) const;
  LpSolution finish(LpStatus status);

  const MilpInstance& instance_;
  SimplexOptions options_;
  int n_ = 0;  // structural columns
  int m_ = 0;  // rows
  std::vector<std::vector<int>> col_rows_;
  std::vector<std::vector<double>> col_values_;
  Eigen::VectorXd rhs_;
  std::vector<double> cost_;

  // Per-solve state.
  std::vector<double> lower_, upper_, x_;
  std::vector<BasisStatus> status_;
  std::vector<int> head_;  // basic column of each row
  Eigen::MatrixXd binv_;
  int64_t iterations_ = 0;
};

}  // namespace revibranch

#endif  // REVIBRANCH_SIMPLEX_H_
