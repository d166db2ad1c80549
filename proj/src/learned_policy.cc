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

#include "revibranch/learned_policy.h"

#include <chrono>
#include <cstring>
#include <fstream>

#include "revibranch/binary_io.h"
#include "revibranch/parameters.h"
#include "revibranch/policies.h"
#include "revibranch/replay.h"

namespace revibranch {

namespace {

constexpr char kMagic[8] = {'R', 'V', 'B', 'R', 'P', 'O', 'L', 'I'};
constexpr uint32_t kVersion = 1;
constexpr uint64_t kExploreStream = 0x45585052;
constexpr uint64_t kActionStream = 0x52414e44;  // shared with RandomPolicy

}  // namespace

LearnedPolicy::LearnedPolicy(const ReviBranchNet& net, LearnedPolicyOptions options)
    : net_(net), options_(options) {
  if (options.trajectory_length <= 0) {
    throw std::invalid_argument("trajectory length must be positive");
  }
  if (options.epsilon < 0.0 || options.epsilon > 1.0) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
}

void LearnedPolicy::reset(const MilpInstance&, uint64_t seed) {
  explore_rng_ = Rng(mix_seed(seed, kExploreStream));
  action_rng_ = Rng(mix_seed(seed, kActionStream));
  graphs_.clear();
  actions_.clear();
  eager_steps_.clear();
  inference_seconds_ = 0.0;
  greedy_decisions_ = 0;
}

BranchChoice LearnedPolicy::choose(const BranchingContext& context) {
  NoGradGuard no_grad;
  const BipartiteGraph& graph = context.graph;
  const int position = static_cast<int>(actions_.size());
  const bool explore =
      options_.epsilon > 0.0 && explore_rng_.uniform() < options_.epsilon;
  int action;
  if (explore) {
    action = random_choice(graph, action_rng_);
  } else {
    const auto start = std::chrono::steady_clock::now();
    const Tensor v = net_.gcn_encode(graph);
    Tensor traj;
    if (options_.use_history && options_.use_decoder) {
      const int first = window_start(position - 1, options_.trajectory_length);
      std::vector<const BipartiteGraph*> window;
      for (int i = first; i < position; ++i) window.push_back(&graphs_[i]);
      traj = revive_window(window, std::span(actions_).subspan(first), first, net_);
    } else {
      traj = net_.start_token();
    }
    action = greedy_action(net_.q_values(v, traj, options_.use_decoder), graph.candidate_mask);
    inference_seconds_ +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ++greedy_decisions_;
  }
  if (options_.record_steps) {
    eager_steps_.push_back(net_.step_representation(graph, action, position).value());
  }
  graphs_.push_back(graph);
  actions_.push_back(action);
  return {action, 0};
}

void save_policy(const PolicyBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  write_pod<uint32_t>(out, kVersion);
  write_pod<int32_t>(out, bundle.options.trajectory_length);
  write_pod<uint8_t>(out, bundle.options.use_history ? 1 : 0);
  write_pod<uint8_t>(out, bundle.options.use_decoder ? 1 : 0);
  save_network(*bundle.net, out);
  if (!out) throw CheckpointError("failed writing '" + path.string() + "'");
}

PolicyBundle load_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("policy checkpoint '" + path.string() + "' not found");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("'" + path.string() + "' is not a policy checkpoint");
  }
  if (read_pod<uint32_t>(in) != kVersion) {
    throw CheckpointError("unsupported policy checkpoint version");
  }
  PolicyBundle bundle;
  bundle.options.trajectory_length = read_pod<int32_t>(in);
  bundle.options.use_history = read_pod<uint8_t>(in) != 0;
  bundle.options.use_decoder = read_pod<uint8_t>(in) != 0;
  bundle.net = std::make_shared<ReviBranchNet>(load_network(in));
  return bundle;
}

}  // namespace revibranch
