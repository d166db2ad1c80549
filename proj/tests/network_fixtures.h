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

// Random graphs and per-block gradient checks for small networks.

#ifndef REVIBRANCH_TESTS_NETWORK_FIXTURES_H_
#define REVIBRANCH_TESTS_NETWORK_FIXTURES_H_

#include <string>
#include <utility>
#include <vector>

#include "gradcheck.h"
#include "revibranch/bipartite_graph.h"
#include "revibranch/network.h"

namespace revibranch::testing {

// Random features, each (i, j) an edge with probability `density`, at least
// one candidate.
inline BipartiteGraph random_graph(int m, int n, Rng& rng, double density = 0.5) {
  BipartiteGraph g;
  g.num_constraints = m;
  g.num_variables = n;
  for (int k = 0; k < m * kNumConstraintFeatures; ++k) {
    g.constraint_features.push_back(rng.uniform(-1, 1));
  }
  for (int k = 0; k < n * kNumVariableFeatures; ++k) {
    g.variable_features.push_back(rng.uniform(-1, 1));
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (rng.bernoulli(density)) {
        g.edge_constraint.push_back(i);
        g.edge_variable.push_back(j);
        g.edge_coefficient.push_back(rng.uniform(-1, 1));
      }
    }
  }
  g.candidate_mask.assign(n, 0);
  for (int j = 0; j < n; ++j) g.candidate_mask[j] = rng.bernoulli(0.5);
  g.candidate_mask[rng.uniform_int(0, n - 1)] = 1;
  return g;
}

inline NetworkConfig tiny_config(uint64_t seed, int blocks = 1) {
  NetworkConfig c;
  c.d = 4;
  c.decoder_blocks = blocks;
  c.max_actions = 8;
  c.seed = seed;
  return c;
}

inline std::vector<Tensor> params_with_prefix(const ReviBranchNet& net,
                                              const std::vector<std::string>& prefixes) {
  std::vector<Tensor> out;
  for (const std::string& name : net.params().names()) {
    for (const std::string& p : prefixes) {
      if (name.rfind(p, 0) == 0) {
        out.push_back(net.params().get(name));
        break;
      }
    }
  }
  return out;
}

// Worst finite-difference error per network block for one seed.
inline std::vector<std::pair<std::string, double>> block_gradient_errors(uint64_t seed) {
  Rng rng(mix_seed(seed, 0x475244));
  ReviBranchNet net(tiny_config(seed));
  // Zero biases can leave every hidden unit of a d=4 MLP dead, which yields
  // all-zero rows that layer norm then amplifies by 1/sqrt(eps). Checking at
  // random biases avoids that degenerate point.
  for (const std::string& name : net.params().names()) {
    if (name.size() > 2 && name.substr(name.size() - 2) == ".b") {
      net.params().get(name).mutable_value() = random_matrix(1, net.params().get(name).cols(), rng, 0.5);
    }
  }
  // Larger alpha makes the fusion path visible in the end-to-end check.
  net.params().get("alpha").mutable_value()(0, 0) = 0.7;
  const int d = 4;
  const BipartiteGraph graph = random_graph(2, 3, rng, 0.7);
  auto param = [&](int r, int c) { return Tensor::parameter(random_matrix(r, c, rng)); };
  auto with = [](std::vector<Tensor> a, const std::vector<Tensor>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  std::vector<std::pair<std::string, double>> out;

  {
    const Matrix r = random_matrix(3, d, rng);
    out.emplace_back("gcn", gradcheck([&] { return probe_loss(net.gcn_encode(graph), r); },
                                      params_with_prefix(net, {"gcn."})));
  }
  {
    const std::vector<int> actions = {1, 3, 1};
    const Matrix r = random_matrix(3, d, rng);
    const Matrix r0 = random_matrix(1, d, rng);
    const double e1 = gradcheck(
        [&] { return probe_loss(net.encode_actions(actions, 2), r); },
        params_with_prefix(net, {"act.table"}));
    const double e2 = gradcheck([&] { return probe_loss(net.encode_actions({}), r0); },
                                params_with_prefix(net, {"act.start"}));
    out.emplace_back("action_embedding", std::max(e1, e2));
  }
  {
    Tensor v = param(3, d), a = param(1, d);
    const Matrix r = random_matrix(1, d, rng);
    out.emplace_back("step_builder",
                     gradcheck([&] { return probe_loss(net.step_builder(v, a), r); },
                               with({v, a}, params_with_prefix(net, {"step."}))));
  }
  {
    Tensor traj = param(2, d), v = param(3, d);
    const Matrix r = random_matrix(3, d, rng);
    out.emplace_back("decoder", gradcheck(
                                    [&] {
                                      const DecodeResult res = net.decode(traj, v);
                                      return probe_loss(concat_rows({res.output, res.r_unified}), r);
                                    },
                                    with({traj, v}, params_with_prefix(net, {"dec", "agg."}))));
  }
  {
    Tensor unified = param(1, d), traj = param(2, d), v = param(3, d);
    const Matrix r = random_matrix(3, d, rng);
    out.emplace_back("fusion",
                     gradcheck([&] { return probe_loss(net.fuse(unified, traj, v), r); },
                               with({unified, traj, v},
                                    params_with_prefix(net, {"e1.", "e2.", "e3.", "fusion", "alpha"}))));
  }
  {
    Tensor v = param(3, d);
    const Matrix r = random_matrix(3, 1, rng);
    out.emplace_back("q_head", gradcheck([&] { return probe_loss(net.q_head(v), r); },
                                         with({v}, params_with_prefix(net, {"qhead"}))));
  }
  {
    const BipartiteGraph past = random_graph(2, 3, rng, 0.7);
    const Matrix r = random_matrix(3, 1, rng);
    std::vector<Tensor> all;
    for (const std::string& name : net.params().names()) all.push_back(net.params().get(name));
    out.emplace_back("end_to_end", gradcheck(
                                       [&] {
                                         const Tensor traj = concat_rows(
                                             {net.step_representation(past, 2, 0),
                                              net.step_representation(graph, 0, 1)});
                                         return probe_loss(net.q_values(graph, traj), r);
                                       },
                                       all));
  }
  return out;
}

}  // namespace revibranch::testing

#endif  // REVIBRANCH_TESTS_NETWORK_FIXTURES_H_
