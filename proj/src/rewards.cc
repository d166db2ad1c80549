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

#include "revibranch/rewards.h"

#include <stdexcept>

namespace revibranch {

std::vector<double> base_rewards(std::span<const DecisionRecord> decisions) {
  if (decisions.empty()) throw std::invalid_argument("base_rewards: no decisions");
  std::vector<double> out;
  out.reserve(decisions.size());
  for (const DecisionRecord& d : decisions) {
    out.push_back(d.both_children_pruned ? 0.0 : -1.0);
  }
  return out;
}

RedistributedRewards iwrr(std::span<const double> base) {
  const size_t length = base.size();
  if (length == 0) throw std::invalid_argument("iwrr: empty episode");
  RedistributedRewards out;
  for (double r : base) out.r_terminal += r;
  const double L = static_cast<double>(length);
  for (size_t i = 0; i < length; ++i) {
    const double w = (L - static_cast<double>(i)) / L;
    out.weights.push_back(w);
    out.dense.push_back(out.r_terminal * w);
    if (length == 1) {
      out.final_rewards.push_back(-0.5);
    } else {
      out.final_rewards.push_back(-0.9 + 0.8 * (w - 1.0 / L) / (1.0 - 1.0 / L));
    }
  }
  return out;
}

std::string to_string(RewardSignal signal) {
  switch (signal) {
    case RewardSignal::kFinal:
      return "final";
    case RewardSignal::kDense:
      return "dense";
    case RewardSignal::kBase:
      return "base";
  }
  return "?";
}

RewardSignal parse_reward_signal(const std::string& name) {
  if (name == "final") return RewardSignal::kFinal;
  if (name == "dense") return RewardSignal::kDense;
  if (name == "base") return RewardSignal::kBase;
  throw std::invalid_argument("unknown reward signal '" + name + "'");
}

std::vector<double> select_rewards(const RedistributedRewards& shaped,
                                   std::span<const double> base, RewardSignal signal) {
  switch (signal) {
    case RewardSignal::kFinal:
      return shaped.final_rewards;
    case RewardSignal::kDense:
      return shaped.dense;
    case RewardSignal::kBase:
      break;
  }
  return {base.begin(), base.end()};
}

}  // namespace revibranch
