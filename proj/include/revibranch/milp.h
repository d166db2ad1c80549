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

#ifndef REVIBRANCH_MILP_H_
#define REVIBRANCH_MILP_H_

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace revibranch {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kIntegralityTolerance = 1e-6;

class InvalidInstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One sparse "<=" row: sum_k coefficients[k] * x[columns[k]] <= rhs.
struct SparseRow {
  std::vector<int> columns;
  std::vector<double> coefficients;
  double rhs = 0.0;

  bool operator==(const SparseRow&) const = default;
};

// min c^T x  s.t.  A x <= b,  l <= x <= u,  x_j integral for j in integer_set.
//
// Every row is stored in "<=" sense; equality rows are split into two
// inequalities by add_equality_row(). Bounds may be +-kInfinity.
struct MilpInstance {
  std::string name;
  std::vector<double> objective;
  std::vector<SparseRow> rows;
  std::vector<double> lower_bounds;
  std::vector<double> upper_bounds;
  std::vector<int> integer_set;  // sorted, unique

  int num_variables() const { return static_cast<int>(objective.size()); }
  int num_constraints() const { return static_cast<int>(rows.size()); }
  int64_t num_nonzeros() const;

  // Per-variable integrality flags derived from integer_set.
  std::vector<bool> integrality_mask() const;

  void add_row(std::vector<int> columns, std::vector<double> coefficients,
               double rhs);
  void add_equality_row(const std::vector<int>& columns,
                        const std::vector<double>& coefficients, double rhs);

  // Throws InvalidInstanceError naming the first violated invariant.
  void validate() const;

  bool operator==(const MilpInstance&) const = default;
};

enum class VariableKind { kBinary, kInteger, kContinuous };

VariableKind variable_kind(const MilpInstance& instance, int column,
                           const std::vector<bool>& integral);

// Objective value c^T x.
double objective_value(const MilpInstance& instance,
                       const std::vector<double>& x);

// Largest violation of A x <= b and of the instance bounds.
double max_violation(const MilpInstance& instance,
                     const std::vector<double>& x);

bool is_integral(double value, double tolerance = kIntegralityTolerance);

}  // namespace revibranch

#endif  // REVIBRANCH_MILP_H_
