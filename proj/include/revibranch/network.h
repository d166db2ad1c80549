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

// The branching network: bipartite GCN and action-sequence encoder, the
// per-step pooling map used to rebuild trajectories, a causal transformer
// decoder over the trajectory with the variables as memory, three-way
// attention fusion gated by a learned scalar, and a per-variable Q head.

#ifndef REVIBRANCH_NETWORK_H_
#define REVIBRANCH_NETWORK_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "revibranch/bipartite_graph.h"
#include "revibranch/parameters.h"
#include "revibranch/tensor.h"

namespace revibranch {

struct NetworkConfig {
  int d = 64;
  int decoder_blocks = 2;
  int heads = 1;
  int max_actions = 1024;  // rows of the action embedding table
  uint64_t seed = 0;

  bool operator==(const NetworkConfig&) const = default;
};

// Sinusoidal encoding of one position: even k -> sin, odd k -> cos.
Matrix positional_encoding(int position, int d);

struct StepTrace {
  Tensor v_mean, v_max, v_att, weights, v_combined;
};

struct DecodeTrace {
  std::vector<Tensor> self_weights;   // per block, per head
  std::vector<Tensor> cross_weights;  // per block, per head
  Tensor aggregation_weights;         // 1 x L
};

struct DecodeResult {
  Tensor output;     // L x d
  Tensor r_unified;  // 1 x d
};

struct FusionTrace {
  Tensor e1, e2, e3;  // 1 x d, n x d, n x d
  Tensor fusion;      // n x d
  std::vector<Tensor> weights;  // attention matrices of the three paths
};

class ReviBranchNet {
 public:
  explicit ReviBranchNet(const NetworkConfig& config);

  const NetworkConfig& config() const { return config_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

  // n x d variable embeddings after a v->c and a c->v half pass.
  Tensor gcn_encode(const BipartiteGraph& graph) const;
  // Rows LN(table[a_i] + PE(first_position + i)); empty -> start token.
  Tensor encode_actions(std::span<const int> actions, int first_position = 0) const;
  Tensor start_token() const;

  // One trajectory step from variable embeddings and an action embedding.
  Tensor step_builder(const Tensor& v, const Tensor& action_embedding,
                      StepTrace* trace = nullptr) const;
  // step_builder(gcn_encode(graph), encode_actions({action}, position)).
  Tensor step_representation(const BipartiteGraph& graph, int action, int position) const;

  DecodeResult decode(const Tensor& r_traj, const Tensor& v,
                      DecodeTrace* trace = nullptr) const;
  // V + alpha * MLP([E1 broadcast; E2; E3]).
  Tensor fuse(const Tensor& r_unified, const Tensor& r_traj, const Tensor& v,
              FusionTrace* trace = nullptr) const;
  Tensor q_head(const Tensor& v_enhanced) const;  // n x 1

  // Q column for a state. With use_decoder false the head reads V directly.
  Tensor q_values(const Tensor& v, const Tensor& r_traj, bool use_decoder = true) const;
  Tensor q_values(const BipartiteGraph& graph, const Tensor& r_traj,
                  bool use_decoder = true) const;

 private:
  Tensor linear(const Tensor& x, const std::string& prefix) const;
  Tensor mlp2(const Tensor& x, const std::string& prefix) const;
  Tensor attention(const Tensor& queries, const Tensor& keys_values,
                   const std::string& prefix, bool output_projection,
                   std::span<const uint8_t> keep,
                   std::vector<Tensor>* weights) const;
  Tensor half_pass(const Tensor& target, const Tensor& source,
                   std::span<const int> source_index, std::span<const int> target_index,
                   const Tensor& coefficients, int target_count,
                   const std::string& prefix) const;
  const Tensor& p(const std::string& name) const { return params_.get(name); }

  NetworkConfig config_;
  ParameterStore params_;
};

// Masked Q values: non-candidates carry -infinity.
std::vector<double> masked_q(const Tensor& q, std::span<const uint8_t> candidate_mask);
// argmax over candidates with the lowest index winning ties.
int greedy_action(const Tensor& q, std::span<const uint8_t> candidate_mask);

// Writes the network config followed by the parameter checkpoint.
void save_network(const ReviBranchNet& net, std::ostream& out);
ReviBranchNet load_network(std::istream& in);
void save_network(const ReviBranchNet& net, const std::filesystem::path& path);
ReviBranchNet load_network(const std::filesystem::path& path);

}  // namespace revibranch

#endif  // REVIBRANCH_NETWORK_H_
