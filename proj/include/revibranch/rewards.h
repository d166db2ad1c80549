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

// Step rewards and importance-weighted redistribution.

#ifndef REVIBRANCH_REWARDS_H_
#define REVIBRANCH_REWARDS_H_

#include <span>
#include <string>
#include <vector>

#include "revibranch/bnb.h"

namespace revibranch {

// -1 per branching, 0 when both children of the decision were pruned.
std::vector<double> base_rewards(std::span<const DecisionRecord> decisions);

struct RedistributedRewards {
  double r_terminal = 0.0;     // sum of base rewards
  std::vector<double> weights;  // w_i = (L - i) / L
  std::vector<double> dense;    // r_terminal * w_i
  // -0.9 + 0.8 (w_i - 1/L) / (1 - 1/L), and -0.5 when L = 1.
  std::vector<double> final_rewards;
};

RedistributedRewards iwrr(std::span<const double> base);

// Which per-step signal the learner regresses on.
enum class RewardSignal { kFinal, kDense, kBase };

std::string to_string(RewardSignal signal);
RewardSignal parse_reward_signal(const std::string& name);

std::vector<double> select_rewards(const RedistributedRewards& shaped,
                                   std::span<const double> base, RewardSignal signal);

}  // namespace revibranch

#endif  // REVIBRANCH_REWARDS_H_
