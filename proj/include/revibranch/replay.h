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

// Episode replay with one graph snapshot per transition, prioritized
// sampling, and reconstruction of step representations from stored states.
//
// Checkpoint layout (little-endian):
//   "RVBRRPLY" magic, u32 version (1), i64 capacity, i64 next episode id,
//   f64 max priority, u64 episode count
//   per episode: i64 id, u64 transition count
//     per transition: serialized graph, i32 action, f64 reward,
//                     u8 terminal, f64 priority

#ifndef REVIBRANCH_REPLAY_H_
#define REVIBRANCH_REPLAY_H_

#include <cstdint>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "revibranch/bipartite_graph.h"
#include "revibranch/network.h"
#include "revibranch/random.h"

namespace revibranch {

class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exceeding capacity with a single episode.
class CapacityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Transition {
  BipartiteGraph graph;  // state s_i; s_{i+1} is step i+1 of the same episode
  int action = -1;
  double reward = 0.0;
  bool terminal = false;
  int64_t episode_id = -1;
  int step = 0;
  double priority = 1.0;  // |TD| + 1e-3, raised to alpha when sampling

  bool operator==(const Transition&) const = default;
};

struct StoredEpisode {
  int64_t id = -1;
  std::vector<Transition> transitions;
};

struct TransitionRef {
  int64_t episode_id = -1;
  int step = 0;
  bool operator==(const TransitionRef&) const = default;
};

struct SampledBatch {
  std::vector<TransitionRef> refs;
  std::vector<double> probabilities;
  std::vector<double> weights;  // (N P)^-beta / max
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(int64_t capacity);

  // The last transition is marked terminal. Returns the episode id.
  int64_t store_episode(std::vector<BipartiteGraph> graphs, std::span<const int> actions,
                        std::span<const double> rewards);

  int64_t capacity() const { return capacity_; }
  int64_t num_transitions() const { return num_transitions_; }
  // One snapshot per transition.
  int64_t num_snapshots() const { return num_transitions_; }
  size_t num_episodes() const { return episodes_.size(); }
  const std::deque<StoredEpisode>& episodes() const { return episodes_; }
  bool contains(int64_t episode_id) const { return find(episode_id) != nullptr; }

  // Throws IntegrityError when the episode or step is absent.
  const StoredEpisode& episode(int64_t episode_id) const;
  const Transition& transition(const TransitionRef& ref) const;

  SampledBatch sample(int batch_size, double alpha, double beta, Rng& rng) const;
  void update_priorities(std::span<const TransitionRef> refs,
                         std::span<const double> td_errors);
  double max_priority() const { return max_priority_; }

  void save(std::ostream& out) const;
  static ReplayBuffer load(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static ReplayBuffer load(const std::filesystem::path& path);

  bool operator==(const ReplayBuffer& other) const;

 private:
  const StoredEpisode* find(int64_t episode_id) const;
  StoredEpisode* find(int64_t episode_id);

  int64_t capacity_;
  int64_t num_transitions_ = 0;
  int64_t next_episode_id_ = 0;
  double max_priority_ = 1.0;
  std::deque<StoredEpisode> episodes_;
};

struct RevivedTrajectory {
  Tensor r_traj;  // rows oldest to newest; start token when the window is empty
  int64_t episode_id = -1;
  int end = -1;     // last included step, -1 when empty
  int length = 0;   // number of real steps
};

// Steps [max(0, end + 1 - T), end], each step i giving
// step_builder(gcn(G_i), LN(table[a_i] + PE(i))).
RevivedTrajectory revive_trajectory(const ReplayBuffer& buffer, int64_t episode_id,
                                    int end, int max_length, const ReviBranchNet& net);

// Same window rule over in-memory history; used during collection.
Tensor revive_window(std::span<const BipartiteGraph* const> graphs,
                     std::span<const int> actions, int first_position,
                     const ReviBranchNet& net);

// First step of the window of at most `max_length` steps ending at `end`.
int window_start(int end, int max_length);

}  // namespace revibranch

#endif  // REVIBRANCH_REPLAY_H_
