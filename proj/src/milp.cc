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

#include "revibranch/milp.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace revibranch {

int64_t MilpInstance::num_nonzeros() const {
  int64_t nnz = 0;
  for (const SparseRow& row : rows) nnz += static_cast<int64_t>(row.columns.size());
  return nnz;
}

std::vector<bool> MilpInstance::integrality_mask() const {
  std::vector<bool> mask(objective.size(), false);
  for (int j : integer_set) mask[j] = true;
  return mask;
}

void MilpInstance::add_row(std::vector<int> columns,
                           std::vector<double> coefficients, double rhs) {
  rows.push_back(SparseRow{std::move(columns), std::move(coefficients), rhs});
}

void MilpInstance::add_equality_row(const std::vector<int>& columns,
                                    const std::vector<double>& coefficients,
                                    double rhs) {
  add_row(columns, coefficients, rhs);
  std::vector<double> negated(coefficients.size());
  std::transform(coefficients.begin(), coefficients.end(), negated.begin(),
                 [](double a) { return -a; });
  add_row(columns, std::move(negated), -rhs);
}

void MilpInstance::validate() const {
  const int n = num_variables();
  if (static_cast<int>(lower_bounds.size()) != n ||
      static_cast<int>(upper_bounds.size()) != n) {
    throw InvalidInstanceError("bound vectors must have length " +
                               std::to_string(n));
  }
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j])) {
      throw InvalidInstanceError("objective coefficient " + std::to_string(j) +
                                 " is not finite");
    }
    if (std::isnan(lower_bounds[j]) || std::isnan(upper_bounds[j]) ||
        lower_bounds[j] == kInfinity || upper_bounds[j] == -kInfinity) {
      throw InvalidInstanceError("invalid bound on variable " +
                                 std::to_string(j));
    }
    if (lower_bounds[j] > upper_bounds[j]) {
      throw InvalidInstanceError("variable " + std::to_string(j) +
                                 " has lower bound above upper bound");
    }
  }
  for (int i = 0; i < num_constraints(); ++i) {
    const SparseRow& row = rows[i];
    if (row.columns.size() != row.coefficients.size()) {
      throw InvalidInstanceError("row " + std::to_string(i) +
                                 " has mismatched index/value lengths");
    }
    if (!std::isfinite(row.rhs)) {
      throw InvalidInstanceError("row " + std::to_string(i) +
                                 " has non-finite right-hand side");
    }
    bool nonzero = false;
    for (size_t k = 0; k < row.columns.size(); ++k) {
      if (row.columns[k] < 0 || row.columns[k] >= n) {
        throw InvalidInstanceError("row " + std::to_string(i) +
                                   " references column out of range");
      }
      if (!std::isfinite(row.coefficients[k])) {
        throw InvalidInstanceError("row " + std::to_string(i) +
                                   " has a non-finite coefficient");
      }
      nonzero |= row.coefficients[k] != 0.0;
    }
    if (!nonzero) {
      throw InvalidInstanceError("row " + std::to_string(i) + " is all zero");
    }
  }
  for (size_t k = 0; k < integer_set.size(); ++k) {
    if (integer_set[k] < 0 || integer_set[k] >= n) {
      throw InvalidInstanceError("integer index out of range");
    }
    if (k > 0 && integer_set[k] <= integer_set[k - 1]) {
      throw InvalidInstanceError("integer set must be sorted and unique");
    }
  }
}

VariableKind variable_kind(const MilpInstance& instance, int column,
                           const std::vector<bool>& integral) {
  if (!integral[column]) return VariableKind::kContinuous;
  if (instance.lower_bounds[column] >= 0.0 &&
      instance.upper_bounds[column] <= 1.0) {
    return VariableKind::kBinary;
  }
  return VariableKind::kInteger;
}

double objective_value(const MilpInstance& instance,
                       const std::vector<double>& x) {
  double value = 0.0;
  for (int j = 0; j < instance.num_variables(); ++j) {
    value += instance.objective[j] * x[j];
  }
  return value;
}

double max_violation(const MilpInstance& instance,
                     const std::vector<double>& x) {
  double worst = 0.0;
  for (const SparseRow& row : instance.rows) {
    double activity = 0.0;
    for (size_t k = 0; k < row.columns.size(); ++k) {
      activity += row.coefficients[k] * x[row.columns[k]];
    }
    worst = std::max(worst, activity - row.rhs);
  }
  for (int j = 0; j < instance.num_variables(); ++j) {
    worst = std::max(worst, instance.lower_bounds[j] - x[j]);
    worst = std::max(worst, x[j] - instance.upper_bounds[j]);
  }
  return worst;
}

bool is_integral(double value, double tolerance) {
  return std::abs(value - std::round(value)) <= tolerance;
}

}  // namespace revibranch
