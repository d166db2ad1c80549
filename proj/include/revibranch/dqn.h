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

// Q-learning for the branching network: epsilon-greedy episode collection,
// prioritized replay over stored episodes, a hard-synced target network, and
// the outer loop with held-out validation and early stopping.

#ifndef REVIBRANCH_DQN_H_
#define REVIBRANCH_DQN_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revibranch/bnb.h"
#include "revibranch/generators.h"
#include "revibranch/learned_policy.h"
#include "revibranch/metrics.h"
#include "revibranch/network.h"
#include "revibranch/parameters.h"
#include "revibranch/replay.h"
#include "revibranch/rewards.h"

namespace revibranch {

// Instance seed ranges; training, validation and test never overlap.
inline constexpr uint64_t kTrainSeedBase = 0;
inline constexpr uint64_t kValidationSeedBase = 1'000'000'000'000ULL;
inline constexpr uint64_t kTestSeedBase = 2'000'000'000'000ULL;
inline constexpr uint64_t kSeedRangeWidth = 1'000'000'000'000ULL;

struct AblationFlags {
  bool no_revival = false;        // trajectory window is the start token only
  bool no_dense_rewards = false;  // regress on raw step rewards
  bool no_decoder = false;        // Q head reads V directly

  bool operator==(const AblationFlags&) const = default;
};

std::string ablation_name(const AblationFlags& flags);
AblationFlags parse_ablation(const std::string& name);

struct TrainConfig {
  NetworkConfig network;   // network.seed is ignored; weights derive from seed
  InstanceSpec instances;  // training and validation distribution

  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int64_t epsilon_decay_decisions = 20000;
  int64_t target_sync_steps = 1000;
  int batch_size = 32;
  double learning_rate = 1e-4;
  double max_grad_norm = 10.0;  // 0 disables clipping
  int trajectory_length = 25;
  int64_t buffer_capacity = 50000;
  int64_t learning_starts = 0;  // stored transitions before updates begin (at least batch_size)
  double priority_alpha = 0.6;
  double priority_beta = 0.4;
  RewardSignal reward_signal = RewardSignal::kFinal;
  AblationFlags ablation;

  int64_t max_epochs = 100;      // one collected instance per epoch
  int train_steps_per_epoch = 1;
  int64_t eval_every = 10;       // epochs between validations; 0 disables
  int validation_size = 20;
  int64_t patience = 0;          // validations without improvement; 0 disables
  int64_t episode_node_limit = 500;
  int64_t eval_node_limit = 5000;
  uint64_t seed = 0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// "key = value" lines; '#' starts a comment. Keys are the field names above,
// network fields as network.d etc., instance fields as instances.family etc.
TrainConfig parse_train_config(const std::string& text);
TrainConfig read_train_config(const std::filesystem::path& path);
std::string format_train_config(const TrainConfig& config);
// Applies one key/value pair; throws on unknown keys or bad values.
void set_train_option(TrainConfig& config, const std::string& key, const std::string& value);
// Every key accepted by set_train_option, in file order.
std::vector<std::string> train_option_keys();

LearnedPolicyOptions policy_options(const TrainConfig& config, double epsilon);
RewardSignal effective_reward_signal(const TrainConfig& config);

struct CollectedEpisode {
  SolveReport report;
  std::vector<BipartiteGraph> graphs;
  std::vector<int> actions;
  std::vector<Matrix> eager_steps;  // only with options.record_steps
  std::vector<double> base;
  RedistributedRewards shaped;  // empty when there were no decisions
};

// One solve with the learned policy; node-limit aborts keep their partial trace.
CollectedEpisode collect_episode(const MilpInstance& instance, const ReviBranchNet& net,
                                 const LearnedPolicyOptions& options, uint64_t seed,
                                 int64_t node_limit);

struct TrainStepResult {
  double loss = 0.0;
  std::vector<TransitionRef> refs;
  std::vector<double> q;        // Q(s_i, a_i)
  std::vector<double> targets;  // r_i + gamma max Q_target(s_{i+1}), or r_i
  std::vector<double> weights;  // importance weights
};

struct EvalResult {
  double geomean_nodes = 0.0;
  double geomean_lp_iterations = 0.0;
  std::vector<int64_t> nodes;
  std::vector<int64_t> lp_iterations;
};

struct TrainLogRow {
  int64_t epoch = 0;
  std::optional<double> loss;  // mean over the epoch's steps
  double epsilon = 0.0;
  std::optional<double> eval_nodes;
  std::optional<double> eval_lp_iterations;

  bool operator==(const TrainLogRow&) const = default;
};

std::string train_log_header();
std::string format_log_row(const TrainLogRow& row);

class Trainer {
 public:
  explicit Trainer(TrainConfig config);

  const TrainConfig& config() const { return config_; }
  ReviBranchNet& online() { return *online_; }
  const ReviBranchNet& online() const { return *online_; }
  const ReviBranchNet& target() const { return *target_; }
  const ReviBranchNet& best() const { return *best_; }
  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  int64_t epoch() const { return epoch_; }
  int64_t decisions() const { return decisions_; }
  int64_t train_steps() const { return train_steps_; }
  const std::vector<TrainLogRow>& log() const { return log_; }
  std::optional<double> best_eval_nodes() const { return best_eval_nodes_; }
  bool stopped_early() const { return stopped_early_; }

  // Linear schedule over collected decisions.
  double epsilon() const;

  // Collects one episode with the online network and stores it when it has
  // at least one decision.
  CollectedEpisode collect(const MilpInstance& instance, double epsilon, uint64_t seed);
  // Requires at least batch_size stored transitions.
  TrainStepResult train_step();
  // Collect, train, and validate when due. Returns the appended log row.
  TrainLogRow run_epoch();
  // Epochs until max_epochs or early stopping.
  void run();
  bool finished() const;

  EvalResult evaluate(const ReviBranchNet& net) const;
  const std::vector<MilpInstance>& validation_set() const { return validation_; }

  PolicyBundle bundle(const ReviBranchNet& net) const;
  // Writes train_log.csv, best.policy, last.policy and config.txt.
  void write_outputs(const std::filesystem::path& dir) const;

  // Full state for bitwise resumption.
  void save_state(const std::filesystem::path& path) const;
  static Trainer load_state(const std::filesystem::path& path);
  bool state_equal(const Trainer& other) const;

 private:
  void load_from(std::istream& in);

  TrainConfig config_;
  std::unique_ptr<ReviBranchNet> online_;
  std::unique_ptr<ReviBranchNet> target_;
  std::unique_ptr<ReviBranchNet> best_;
  ReplayBuffer buffer_;
  Rng sample_rng_;
  std::vector<MilpInstance> validation_;
  int64_t epoch_ = 0;
  int64_t decisions_ = 0;
  int64_t train_steps_ = 0;
  std::optional<double> best_eval_nodes_;
  int64_t evals_since_best_ = 0;
  bool stopped_early_ = false;
  std::vector<TrainLogRow> log_;
};

}  // namespace revibranch

#endif  // REVIBRANCH_DQN_H_
