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

#include "revibranch/pseudocost.h"

#include <stdexcept>

namespace revibranch {

void PseudocostTable::reset(int num_variables) {
  for (int d = 0; d < 2; ++d) {
    sum_[d].assign(num_variables, 0.0);
    count_[d].assign(num_variables, 0);
    initialized_[d] = 0;
  }
  observations_ = 0;
}

void PseudocostTable::update(int var, BranchDirection direction, double gain,
                             double fraction_moved) {
  if (!(fraction_moved > 0.0)) {
    throw std::invalid_argument("pseudocost update needs a positive fraction");
  }
  const int d = index(direction);
  if (count_[d][var] == 0) ++initialized_[d];
  sum_[d][var] += gain / fraction_moved;
  ++count_[d][var];
  ++observations_;
}

double PseudocostTable::value(int var, BranchDirection direction) const {
  const int d = index(direction);
  if (count_[d][var] == 0) return 0.0;
  return sum_[d][var] / static_cast<double>(count_[d][var]);
}

double PseudocostTable::table_mean(BranchDirection direction) const {
  const int d = index(direction);
  if (initialized_[d] == 0) return 0.0;
  double total = 0.0;
  for (int j = 0; j < size(); ++j) {
    if (count_[d][j] > 0) total += sum_[d][j] / static_cast<double>(count_[d][j]);
  }
  return total / static_cast<double>(initialized_[d]);
}

double PseudocostTable::estimate(int var, BranchDirection direction,
                                 double fallback) const {
  if (initialized(var, direction)) return value(var, direction);
  if (initialized_[index(direction)] > 0) return table_mean(direction);
  return fallback;
}

}  // namespace revibranch
