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

#include "revibranch/simplex.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

namespace revibranch {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kNumericallyUnstable:
      return "numerically_unstable";
  }
  return "unknown";
}

LpProblem LpProblem::root(const MilpInstance& instance) {
  LpProblem problem;
  problem.instance = &instance;
  problem.lower = instance.lower_bounds;
  problem.upper = instance.upper_bounds;
  return problem;
}

LpProblem tighten_bound(const LpProblem& parent, int var,
                        BranchDirection direction, double value) {
  LpProblem child = parent;
  if (direction == BranchDirection::kDown) {
    child.upper[var] = std::min(child.upper[var], std::floor(value));
  } else {
    child.lower[var] = std::max(child.lower[var], std::ceil(value));
  }
  if (child.lower[var] > child.upper[var]) child.infeasible_by_bounds = true;
  return child;
}

SimplexSolver::SimplexSolver(const MilpInstance& instance,
                             SimplexOptions options)
    : instance_(instance), options_(options) {
  n_ = instance.num_variables();
  m_ = instance.num_constraints();
  col_rows_.assign(n_, {});
  col_values_.assign(n_, {});
  rhs_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    const SparseRow& row = instance.rows[i];
    rhs_[i] = row.rhs;
    for (size_t k = 0; k < row.columns.size(); ++k) {
      if (row.coefficients[k] == 0.0) continue;
      col_rows_[row.columns[k]].push_back(i);
      col_values_[row.columns[k]].push_back(row.coefficients[k]);
    }
  }
  cost_.assign(n_ + m_, 0.0);
  for (int j = 0; j < n_; ++j) cost_[j] = instance.objective[j];
  if (options_.max_iterations <= 0) {
    options_.max_iterations = 200LL * (m_ + n_) + 10000;
  }
}

void SimplexSolver::column(int j, Eigen::VectorXd& out) const {
  out.setZero(m_);
  if (j >= n_) {
    out[j - n_] = 1.0;
    return;
  }
  for (size_t k = 0; k < col_rows_[j].size(); ++k) {
    out[col_rows_[j][k]] = col_values_[j][k];
  }
}

double SimplexSolver::column_dot(int j, const Eigen::VectorXd& y) const {
  if (j >= n_) return y[j - n_];
  double sum = 0.0;
  for (size_t k = 0; k < col_rows_[j].size(); ++k) {
    sum += y[col_rows_[j][k]] * col_values_[j][k];
  }
  return sum;
}

void SimplexSolver::slack_basis() {
  const int total = n_ + m_;
  status_.assign(total, BasisStatus::kAtLower);
  head_.resize(m_);
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(lower_[j])) {
      status_[j] = BasisStatus::kAtLower;
    } else if (std::isfinite(upper_[j])) {
      status_[j] = BasisStatus::kAtUpper;
    } else {
      status_[j] = BasisStatus::kFree;
    }
  }
  for (int i = 0; i < m_; ++i) {
    status_[n_ + i] = BasisStatus::kBasic;
    head_[i] = n_ + i;
  }
}

void SimplexSolver::initialize(const LpProblem& problem,
                               const Basis* warm_basis) {
  const int total = n_ + m_;
  lower_.assign(total, 0.0);
  upper_.assign(total, kInfinity);
  for (int j = 0; j < n_; ++j) {
    lower_[j] = problem.lower[j];
    upper_[j] = problem.upper[j];
  }
  x_.assign(total, 0.0);
  iterations_ = 0;

  bool warm_ok = false;
  if (warm_basis != nullptr &&
      static_cast<int>(warm_basis->status.size()) == total) {
    status_ = warm_basis->status;
    head_.clear();
    for (int j = 0; j < total; ++j) {
      if (status_[j] == BasisStatus::kBasic) head_.push_back(j);
    }
    if (static_cast<int>(head_.size()) == m_) {
      for (int j = 0; j < total; ++j) {
        BasisStatus& s = status_[j];
        if (s == BasisStatus::kBasic) continue;
        const bool lo = std::isfinite(lower_[j]);
        const bool up = std::isfinite(upper_[j]);
        if (s == BasisStatus::kAtLower && !lo) {
          s = up ? BasisStatus::kAtUpper : BasisStatus::kFree;
        } else if (s == BasisStatus::kAtUpper && !up) {
          s = lo ? BasisStatus::kAtLower : BasisStatus::kFree;
        } else if (s == BasisStatus::kFree && (lo || up)) {
          s = lo ? BasisStatus::kAtLower : BasisStatus::kAtUpper;
        }
      }
      warm_ok = refactor();
    }
  }
  if (!warm_ok) {
    slack_basis();
    binv_.setIdentity(m_, m_);
  }
  for (int j = 0; j < total; ++j) {
    switch (status_[j]) {
      case BasisStatus::kAtLower:
        x_[j] = lower_[j];
        break;
      case BasisStatus::kAtUpper:
        x_[j] = upper_[j];
        break;
      default:
        x_[j] = 0.0;
    }
  }
  compute_basic_values();
}

bool SimplexSolver::refactor() {
  Eigen::MatrixXd basis_matrix(m_, m_);
  Eigen::VectorXd col;
  for (int i = 0; i < m_; ++i) {
    column(head_[i], col);
    basis_matrix.col(i) = col;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
  if (m_ > 0) {
    const double smallest = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    const double largest =
        std::max(1.0, basis_matrix.cwiseAbs().maxCoeff());
    if (!(smallest > 1e-11 * largest)) return false;
  }
  binv_ = lu.inverse();
  return binv_.allFinite();
}

void SimplexSolver::compute_basic_values() {
  Eigen::VectorXd residual = rhs_;
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == BasisStatus::kBasic || x_[j] == 0.0) continue;
    if (j >= n_) {
      residual[j - n_] -= x_[j];
    } else {
      for (size_t k = 0; k < col_rows_[j].size(); ++k) {
        residual[col_rows_[j][k]] -= col_values_[j][k] * x_[j];
      }
    }
  }
  const Eigen::VectorXd basic = binv_ * residual;
  for (int i = 0; i < m_; ++i) x_[head_[i]] = basic[i];
}

double SimplexSolver::infeasibility(int row) const {
  const int j = head_[row];
  if (x_[j] < lower_[j] - options_.primal_tolerance) return x_[j] - lower_[j];
  if (x_[j] > upper_[j] + options_.primal_tolerance) return x_[j] - upper_[j];
  return 0.0;
}

LpSolution SimplexSolver::solve(const LpProblem& problem,
                                const Basis* warm_basis) {
  if (problem.instance != &instance_ &&
      (problem.instance == nullptr ||
       problem.instance->num_variables() != n_)) {
    throw std::invalid_argument("LpProblem does not match solver instance");
  }
  for (int j = 0; j < n_; ++j) {
    if (problem.lower[j] > problem.upper[j]) {
      LpSolution infeasible;
      infeasible.status = LpStatus::kInfeasible;
      return infeasible;
    }
  }
  initialize(problem, warm_basis);

  const int total = n_ + m_;
  const double ptol = options_.primal_tolerance;
  const double dtol = options_.dual_tolerance;
  const int64_t degenerate_budget =
      static_cast<int64_t>(options_.degenerate_factor) * (m_ + n_);
  int64_t degenerate_pivots = 0;
  bool bland = false;
  int pivots_since_refactor = 0;
  int final_checks = 0;

  Eigen::VectorXd phase_cost(m_);
  Eigen::VectorXd y(m_);
  Eigen::VectorXd entering_col;
  Eigen::VectorXd alpha(m_);

  while (true) {
    if (iterations_ >= options_.max_iterations) {
      return finish(LpStatus::kNumericallyUnstable);
    }
    if (pivots_since_refactor >= options_.refactor_period) {
      if (!refactor()) return finish(LpStatus::kNumericallyUnstable);
      compute_basic_values();
      pivots_since_refactor = 0;
    }

    bool feasible = true;
    for (int i = 0; i < m_; ++i) {
      const double infeas = infeasibility(i);
      if (infeas != 0.0) feasible = false;
      phase_cost[i] = infeas < 0.0 ? -1.0 : (infeas > 0.0 ? 1.0 : 0.0);
    }
    const Phase phase = feasible ? Phase::kOptimality : Phase::kFeasibility;
    if (phase == Phase::kOptimality) {
      for (int i = 0; i < m_; ++i) phase_cost[i] = cost_[head_[i]];
    }
    y.noalias() = binv_.transpose() * phase_cost;

    // Pricing.
    int entering = -1;
    double best = 0.0;
    double entering_d = 0.0;
    for (int j = 0; j < total; ++j) {
      const BasisStatus s = status_[j];
      if (s == BasisStatus::kBasic || lower_[j] == upper_[j]) continue;
      const double c = phase == Phase::kOptimality ? cost_[j] : 0.0;
      const double d = c - column_dot(j, y);
      bool eligible = false;
      if (s == BasisStatus::kAtLower) {
        eligible = d < -dtol;
      } else if (s == BasisStatus::kAtUpper) {
        eligible = d > dtol;
      } else {
        eligible = std::abs(d) > dtol;
      }
      if (!eligible) continue;
      if (bland) {
        entering = j;
        entering_d = d;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        entering = j;
        entering_d = d;
      }
    }

    if (entering < 0) {
      if (phase == Phase::kFeasibility) return finish(LpStatus::kInfeasible);
      // Confirm optimality on a fresh factorization.
      if (pivots_since_refactor > 0 && final_checks < 3) {
        ++final_checks;
        if (!refactor()) return finish(LpStatus::kNumericallyUnstable);
        compute_basic_values();
        pivots_since_refactor = 0;
        continue;
      }
      return finish(LpStatus::kOptimal);
    }

    const double direction = entering_d < 0.0 ? 1.0 : -1.0;
    column(entering, entering_col);
    alpha.noalias() = binv_ * entering_col;

    // Ratio test. x_B[i] moves by delta_i * t.
    double step = kInfinity;
    int leaving_row = -1;
    bool leaves_at_upper = false;
    double leaving_pivot = 0.0;
    if (std::isfinite(lower_[entering]) && std::isfinite(upper_[entering])) {
      step = upper_[entering] - lower_[entering];
    }
    for (int i = 0; i < m_; ++i) {
      if (std::abs(alpha[i]) < options_.pivot_tolerance) continue;
      const double delta = -direction * alpha[i];
      const int j = head_[i];
      const double xb = x_[j];
      double limit = kInfinity;
      bool at_upper = false;
      if (delta < 0.0) {
        if (xb > upper_[j] + ptol) {
          limit = (xb - upper_[j]) / -delta;
          at_upper = true;
        } else if (xb >= lower_[j] - ptol && std::isfinite(lower_[j])) {
          limit = std::max(0.0, xb - lower_[j]) / -delta;
        }
      } else {
        if (xb < lower_[j] - ptol) {
          limit = (lower_[j] - xb) / delta;
        } else if (xb <= upper_[j] + ptol && std::isfinite(upper_[j])) {
          limit = std::max(0.0, upper_[j] - xb) / delta;
          at_upper = true;
        }
      }
      if (!std::isfinite(limit)) continue;
      bool take = false;
      if (leaving_row < 0) {
        take = limit < step;
      } else {
        const double tie = 1e-12 * (1.0 + std::abs(step));
        if (limit < step - tie) {
          take = true;
        } else if (limit <= step + tie) {
          take = bland ? j < head_[leaving_row]
                       : std::abs(alpha[i]) > std::abs(leaving_pivot);
        }
      }
      if (take) {
        step = limit;
        leaving_row = i;
        leaves_at_upper = at_upper;
        leaving_pivot = alpha[i];
      }
    }

    if (!std::isfinite(step)) {
      if (phase == Phase::kOptimality) return finish(LpStatus::kUnbounded);
      return finish(LpStatus::kNumericallyUnstable);
    }

    ++iterations_;
    if (step <= ptol) {
      if (++degenerate_pivots > degenerate_budget) bland = true;
    }

    x_[entering] += direction * step;
    for (int i = 0; i < m_; ++i) x_[head_[i]] += -direction * alpha[i] * step;

    if (leaving_row < 0) {
      // Bound flip of the entering column.
      status_[entering] = direction > 0.0 ? BasisStatus::kAtUpper
                                          : BasisStatus::kAtLower;
      x_[entering] = direction > 0.0 ? upper_[entering] : lower_[entering];
      continue;
    }

    const int leaving = head_[leaving_row];
    x_[leaving] = leaves_at_upper ? upper_[leaving] : lower_[leaving];
    status_[leaving] =
        leaves_at_upper ? BasisStatus::kAtUpper : BasisStatus::kAtLower;
    status_[entering] = BasisStatus::kBasic;
    head_[leaving_row] = entering;

    // Product-form update of the explicit inverse.
    const double pivot = alpha[leaving_row];
    binv_.row(leaving_row) /= pivot;
    const Eigen::RowVectorXd pivot_row = binv_.row(leaving_row);
    for (int i = 0; i < m_; ++i) {
      if (i == leaving_row || alpha[i] == 0.0) continue;
      binv_.row(i) -= alpha[i] * pivot_row;
    }
    ++pivots_since_refactor;
  }
}

LpSolution SimplexSolver::finish(LpStatus status) {
  LpSolution solution;
  solution.status = status;
  solution.iterations = iterations_;
  solution.basis.status = status_;
  if (status != LpStatus::kOptimal) {
    solution.objective_value =
        status == LpStatus::kUnbounded ? -kInfinity : kInfinity;
    return solution;
  }
  solution.values.assign(x_.begin(), x_.begin() + n_);
  // Snap nonbasic columns exactly onto their bounds.
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == BasisStatus::kAtLower) solution.values[j] = lower_[j];
    if (status_[j] == BasisStatus::kAtUpper) solution.values[j] = upper_[j];
  }
  solution.objective_value = objective_value(instance_, solution.values);

  Eigen::VectorXd basic_cost(m_);
  for (int i = 0; i < m_; ++i) basic_cost[i] = cost_[head_[i]];
  const Eigen::VectorXd y = binv_.transpose() * basic_cost;
  solution.duals.assign(y.data(), y.data() + m_);
  solution.reduced_costs.resize(n_);
  for (int j = 0; j < n_; ++j) {
    solution.reduced_costs[j] =
        status_[j] == BasisStatus::kBasic ? 0.0 : cost_[j] - column_dot(j, y);
  }
  solution.slacks.resize(m_);
  for (int i = 0; i < m_; ++i) {
    double activity = 0.0;
    const SparseRow& row = instance_.rows[i];
    for (size_t k = 0; k < row.columns.size(); ++k) {
      activity += row.coefficients[k] * solution.values[row.columns[k]];
    }
    solution.slacks[i] = row.rhs - activity;
  }
  return solution;
}

}  // namespace revibranch
