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

// Branching with the Q network, epsilon-greedy, rebuilding the trajectory
// window from the in-episode history at every decision.
//
// Policy file layout: "RVBRPOLI" magic, u32 version (1), i32 trajectory
// length, u8 use_history, u8 use_decoder, then a network checkpoint.

#ifndef REVIBRANCH_LEARNED_POLICY_H_
#define REVIBRANCH_LEARNED_POLICY_H_

#include <filesystem>
#include <memory>
#include <vector>

#include "revibranch/bnb.h"
#include "revibranch/network.h"
#include "revibranch/random.h"

namespace revibranch {

struct LearnedPolicyOptions {
  int trajectory_length = 25;
  bool use_history = true;   // false: start token only
  bool use_decoder = true;   // false: Q head reads V
  double epsilon = 0.0;
  bool record_steps = false;  // keep eagerly computed step representations

  bool operator==(const LearnedPolicyOptions&) const = default;
};

class LearnedPolicy : public BranchingPolicy {
 public:
  LearnedPolicy(const ReviBranchNet& net, LearnedPolicyOptions options);

  std::string name() const override { return "revibranch"; }
  // Exploration coin and uniform pick use separate streams; the pick stream
  // matches RandomPolicy so epsilon = 1 reproduces it exactly.
  void reset(const MilpInstance& instance, uint64_t seed) override;
  BranchChoice choose(const BranchingContext& context) override;

  const LearnedPolicyOptions& options() const { return options_; }
  void set_epsilon(double epsilon) { options_.epsilon = epsilon; }

  const std::vector<BipartiteGraph>& graphs() const { return graphs_; }
  const std::vector<int>& actions() const { return actions_; }
  const std::vector<Matrix>& eager_steps() const { return eager_steps_; }
  // Summed over greedy decisions since reset.
  double inference_seconds() const { return inference_seconds_; }
  int greedy_decisions() const { return greedy_decisions_; }

 private:
  const ReviBranchNet& net_;
  LearnedPolicyOptions options_;
  Rng explore_rng_;
  Rng action_rng_;
  std::vector<BipartiteGraph> graphs_;
  std::vector<int> actions_;
  std::vector<Matrix> eager_steps_;
  double inference_seconds_ = 0.0;
  int greedy_decisions_ = 0;
};

// A network together with the options it was trained under.
struct PolicyBundle {
  std::shared_ptr<ReviBranchNet> net;
  LearnedPolicyOptions options;
};

void save_policy(const PolicyBundle& bundle, const std::filesystem::path& path);
PolicyBundle load_policy(const std::filesystem::path& path);

}  // namespace revibranch

#endif  // REVIBRANCH_LEARNED_POLICY_H_
