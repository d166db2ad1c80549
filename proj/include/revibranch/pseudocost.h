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

#ifndef REVIBRANCH_PSEUDOCOST_H_
#define REVIBRANCH_PSEUDOCOST_H_

#include <cstdint>
#include <vector>

#include "revibranch/simplex.h"

namespace revibranch {

// Per-variable mean objective gain per unit of fractionality moved, kept
// separately for the down and up directions. Means are stored as sum/count
// so the final values depend only on the multiset of observations (up to
// floating-point summation order).
class PseudocostTable {
 public:
  explicit PseudocostTable(int num_variables = 0) { reset(num_variables); }

  void reset(int num_variables);
  int size() const { return static_cast<int>(count_[0].size()); }

  // Records one observation. `fraction_moved` must be positive.
  void update(int var, BranchDirection direction, double gain,
              double fraction_moved);

  bool initialized(int var, BranchDirection direction) const {
    return count_[index(direction)][var] > 0;
  }
  int64_t count(int var, BranchDirection direction) const {
    return count_[index(direction)][var];
  }
  // Mean for an initialized entry; 0 otherwise.
  double value(int var, BranchDirection direction) const;
  // Average of the per-variable means of one direction; 0 when none exist.
  double table_mean(BranchDirection direction) const;
  bool empty() const { return observations_ == 0; }

  // value() if initialized, else table_mean() if any entry of that direction
  // is initialized, else `fallback`.
  double estimate(int var, BranchDirection direction, double fallback) const;

 private:
  static int index(BranchDirection d) { return d == BranchDirection::kDown ? 0 : 1; }

  std::vector<double> sum_[2];
  std::vector<int64_t> count_[2];
  int64_t initialized_[2] = {0, 0};
  int64_t observations_ = 0;
};

}  // namespace revibranch

#endif  // REVIBRANCH_PSEUDOCOST_H_
