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

#include "revibranch/replay.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>

#include "revibranch/binary_io.h"
#include "revibranch/parameters.h"

namespace revibranch {

namespace {

constexpr char kMagic[8] = {'R', 'V', 'B', 'R', 'R', 'P', 'L', 'Y'};
constexpr uint32_t kVersion = 1;
constexpr double kPriorityOffset = 1e-3;

}  // namespace

ReplayBuffer::ReplayBuffer(int64_t capacity) : capacity_(capacity) {
  if (capacity <= 0) throw std::invalid_argument("replay capacity must be positive");
}

int64_t ReplayBuffer::store_episode(std::vector<BipartiteGraph> graphs,
                                    std::span<const int> actions,
                                    std::span<const double> rewards) {
  const size_t length = graphs.size();
  if (length == 0) throw std::invalid_argument("store_episode: empty episode");
  if (actions.size() != length || rewards.size() != length) {
    throw std::invalid_argument("store_episode: " + std::to_string(length) + " graphs, " +
                                std::to_string(actions.size()) + " actions, " +
                                std::to_string(rewards.size()) + " rewards");
  }
  if (static_cast<int64_t>(length) > capacity_) {
    throw CapacityError("episode of length " + std::to_string(length) +
                        " exceeds replay capacity " + std::to_string(capacity_));
  }
  StoredEpisode episode;
  episode.id = next_episode_id_++;
  episode.transitions.reserve(length);
  for (size_t i = 0; i < length; ++i) {
    Transition t;
    t.graph = std::move(graphs[i]);
    t.action = actions[i];
    t.reward = rewards[i];
    t.terminal = i + 1 == length;
    t.episode_id = episode.id;
    t.step = static_cast<int>(i);
    t.priority = max_priority_;
    episode.transitions.push_back(std::move(t));
  }
  num_transitions_ += static_cast<int64_t>(length);
  episodes_.push_back(std::move(episode));
  while (num_transitions_ > capacity_) {
    num_transitions_ -= static_cast<int64_t>(episodes_.front().transitions.size());
    episodes_.pop_front();
  }
  return episodes_.back().id;
}

const StoredEpisode* ReplayBuffer::find(int64_t episode_id) const {
  // Ids increase along the deque.
  auto it = std::lower_bound(
      episodes_.begin(), episodes_.end(), episode_id,
      [](const StoredEpisode& e, int64_t id) { return e.id < id; });
  if (it == episodes_.end() || it->id != episode_id) return nullptr;
  return &*it;
}

StoredEpisode* ReplayBuffer::find(int64_t episode_id) {
  return const_cast<StoredEpisode*>(std::as_const(*this).find(episode_id));
}

const StoredEpisode& ReplayBuffer::episode(int64_t episode_id) const {
  const StoredEpisode* e = find(episode_id);
  if (!e) throw IntegrityError("episode " + std::to_string(episode_id) + " not in buffer");
  return *e;
}

const Transition& ReplayBuffer::transition(const TransitionRef& ref) const {
  const StoredEpisode& e = episode(ref.episode_id);
  if (ref.step < 0 || ref.step >= static_cast<int>(e.transitions.size())) {
    throw IntegrityError("episode " + std::to_string(ref.episode_id) + " has no step " +
                         std::to_string(ref.step));
  }
  return e.transitions[ref.step];
}

SampledBatch ReplayBuffer::sample(int batch_size, double alpha, double beta,
                                  Rng& rng) const {
  if (num_transitions_ == 0) throw std::invalid_argument("sample: replay buffer is empty");
  if (batch_size <= 0) throw std::invalid_argument("sample: batch size must be positive");
  std::vector<double> cumulative;
  std::vector<TransitionRef> refs;
  cumulative.reserve(num_transitions_);
  refs.reserve(num_transitions_);
  double total = 0.0;
  for (const StoredEpisode& e : episodes_) {
    for (const Transition& t : e.transitions) {
      total += std::pow(t.priority, alpha);
      cumulative.push_back(total);
      refs.push_back({e.id, t.step});
    }
  }
  const double n = static_cast<double>(num_transitions_);
  SampledBatch batch;
  double max_weight = 0.0;
  for (int b = 0; b < batch_size; ++b) {
    const double u = rng.uniform() * total;
    size_t k = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
    k = std::min(k, cumulative.size() - 1);
    const double mass = cumulative[k] - (k == 0 ? 0.0 : cumulative[k - 1]);
    const double p = mass / total;
    const double w = std::pow(n * p, -beta);
    batch.refs.push_back(refs[k]);
    batch.probabilities.push_back(p);
    batch.weights.push_back(w);
    max_weight = std::max(max_weight, w);
  }
  for (double& w : batch.weights) w /= max_weight;
  return batch;
}

void ReplayBuffer::update_priorities(std::span<const TransitionRef> refs,
                                     std::span<const double> td_errors) {
  if (refs.size() != td_errors.size()) {
    throw std::invalid_argument("update_priorities: size mismatch");
  }
  for (size_t k = 0; k < refs.size(); ++k) {
    StoredEpisode* e = find(refs[k].episode_id);
    // Evicted between sampling and update: nothing to do.
    if (!e || refs[k].step < 0 || refs[k].step >= static_cast<int>(e->transitions.size())) {
      continue;
    }
    const double p = std::abs(td_errors[k]) + kPriorityOffset;
    e->transitions[refs[k].step].priority = p;
    max_priority_ = std::max(max_priority_, p);
  }
}

void ReplayBuffer::save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  write_pod<uint32_t>(out, kVersion);
  write_pod<int64_t>(out, capacity_);
  write_pod<int64_t>(out, next_episode_id_);
  write_pod<double>(out, max_priority_);
  write_pod<uint64_t>(out, episodes_.size());
  for (const StoredEpisode& e : episodes_) {
    write_pod<int64_t>(out, e.id);
    write_pod<uint64_t>(out, e.transitions.size());
    for (const Transition& t : e.transitions) {
      t.graph.serialize(out);
      write_pod<int32_t>(out, t.action);
      write_pod<double>(out, t.reward);
      write_pod<uint8_t>(out, t.terminal ? 1 : 0);
      write_pod<double>(out, t.priority);
    }
  }
  if (!out) throw CheckpointError("failed writing replay buffer");
}

ReplayBuffer ReplayBuffer::load(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a replay buffer checkpoint (bad magic)");
  }
  if (read_pod<uint32_t>(in) != kVersion) {
    throw CheckpointError("unsupported replay buffer version");
  }
  ReplayBuffer buffer(read_pod<int64_t>(in));
  buffer.next_episode_id_ = read_pod<int64_t>(in);
  buffer.max_priority_ = read_pod<double>(in);
  const uint64_t episodes = read_pod<uint64_t>(in);
  for (uint64_t k = 0; k < episodes; ++k) {
    StoredEpisode e;
    e.id = read_pod<int64_t>(in);
    const uint64_t count = read_pod<uint64_t>(in);
    for (uint64_t i = 0; i < count; ++i) {
      Transition t;
      t.graph = BipartiteGraph::deserialize(in);
      t.action = read_pod<int32_t>(in);
      t.reward = read_pod<double>(in);
      t.terminal = read_pod<uint8_t>(in) != 0;
      t.priority = read_pod<double>(in);
      t.episode_id = e.id;
      t.step = static_cast<int>(i);
      e.transitions.push_back(std::move(t));
    }
    if (e.transitions.empty() || !e.transitions.back().terminal) {
      throw IntegrityError("stored episode " + std::to_string(e.id) + " is incomplete");
    }
    if (!buffer.episodes_.empty() && buffer.episodes_.back().id >= e.id) {
      throw IntegrityError("episode ids out of order");
    }
    buffer.num_transitions_ += static_cast<int64_t>(count);
    buffer.episodes_.push_back(std::move(e));
  }
  return buffer;
}

void ReplayBuffer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  save(out);
}

ReplayBuffer ReplayBuffer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open replay checkpoint '" + path.string() + "'");
  return load(in);
}

bool ReplayBuffer::operator==(const ReplayBuffer& other) const {
  if (capacity_ != other.capacity_ || num_transitions_ != other.num_transitions_ ||
      next_episode_id_ != other.next_episode_id_ || max_priority_ != other.max_priority_ ||
      episodes_.size() != other.episodes_.size()) {
    return false;
  }
  for (size_t k = 0; k < episodes_.size(); ++k) {
    if (episodes_[k].id != other.episodes_[k].id ||
        episodes_[k].transitions != other.episodes_[k].transitions) {
      return false;
    }
  }
  return true;
}

int window_start(int end, int max_length) {
  if (max_length <= 0) throw std::invalid_argument("trajectory length must be positive");
  return std::max(0, end + 1 - max_length);
}

Tensor revive_window(std::span<const BipartiteGraph* const> graphs,
                     std::span<const int> actions, int first_position,
                     const ReviBranchNet& net) {
  if (graphs.size() != actions.size()) {
    throw std::invalid_argument("revive_window: graphs and actions differ in length");
  }
  if (graphs.empty()) return net.start_token();
  std::vector<Tensor> rows;
  rows.reserve(graphs.size());
  for (size_t i = 0; i < graphs.size(); ++i) {
    if (!graphs[i] || graphs[i]->num_variables <= 0) {
      throw IntegrityError("missing graph snapshot at step " +
                           std::to_string(first_position + static_cast<int>(i)));
    }
    rows.push_back(
        net.step_representation(*graphs[i], actions[i], first_position + static_cast<int>(i)));
  }
  return rows.size() == 1 ? rows[0] : concat_rows(rows);
}

RevivedTrajectory revive_trajectory(const ReplayBuffer& buffer, int64_t episode_id,
                                    int end, int max_length, const ReviBranchNet& net) {
  const StoredEpisode& e = buffer.episode(episode_id);
  if (end >= static_cast<int>(e.transitions.size()) || end < -1) {
    throw IntegrityError("episode " + std::to_string(episode_id) + " has no step " +
                         std::to_string(end));
  }
  const int start = window_start(end, max_length);
  std::vector<const BipartiteGraph*> graphs;
  std::vector<int> actions;
  for (int i = start; i <= end; ++i) {
    graphs.push_back(&e.transitions[i].graph);
    actions.push_back(e.transitions[i].action);
  }
  RevivedTrajectory out;
  out.r_traj = revive_window(graphs, actions, start, net);
  out.episode_id = episode_id;
  out.end = end;
  out.length = static_cast<int>(graphs.size());
  return out;
}

}  // namespace revibranch
