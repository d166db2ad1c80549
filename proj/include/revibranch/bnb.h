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

#ifndef REVIBRANCH_BNB_H_
#define REVIBRANCH_BNB_H_

#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "revibranch/bipartite_graph.h"
#include "revibranch/milp.h"
#include "revibranch/simplex.h"

namespace revibranch {

struct SearchNode {
  int64_t id = 0;
  int64_t parent_id = -1;
  int depth = 0;
  LpProblem problem;
  LpSolution lp;
  int branch_var = -1;  // edge that created this node; -1 at the root
  BranchDirection branch_dir = BranchDirection::kDown;
};

// Everything a policy may look at when choosing a variable.
struct BranchingContext {
  const MilpInstance& instance;
  const SearchNode& node;
  const BipartiteGraph& graph;
  std::span<const int> history;  // earlier decisions, in decision order
  SimplexSolver& lp_solver;      // for policies that probe child LPs
};

struct BranchChoice {
  int variable = -1;
  int64_t extra_lp_iterations = 0;  // pivots spent inside the policy
};

// What happened to both children of one branching.
struct BranchOutcome {
  int variable = -1;
  double value = 0.0;  // fractional LP value that was split
  double parent_objective = 0.0;
  bool down_feasible = false;
  bool up_feasible = false;
  double down_objective = kInfinity;
  double up_objective = kInfinity;
};

class BranchingPolicy {
 public:
  virtual ~BranchingPolicy() = default;
  virtual std::string name() const = 0;
  // Called once at the start of every solve.
  virtual void reset(const MilpInstance& /*instance*/, uint64_t /*seed*/) {}
  // Must return a variable whose candidate_mask entry is set.
  virtual BranchChoice choose(const BranchingContext& context) = 0;
  virtual void observe(const BranchOutcome& /*outcome*/) {}
};

enum class NodeSelection { kBestBound, kDepthFirst };

struct BnbConfig {
  int64_t node_limit = 1'000'000;
  double time_limit_seconds = kInfinity;
  NodeSelection node_selection = NodeSelection::kBestBound;
  bool record_graphs = false;  // keep every decision's state graph
  bool warm_start = true;      // children start from the parent basis
  uint64_t seed = 0;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kLimit, kNumericalError };

std::string to_string(SolveStatus status);

enum class ChildFate { kInfeasible, kBoundPruned, kIntegral, kOpen };

// True iff neither child survives as an open node.
bool detect_pruned_children(ChildFate down, ChildFate up);

struct DecisionRecord {
  int64_t node_id = 0;
  int depth = 0;
  int graph_id = -1;  // index into SolveReport::graphs, -1 if not recorded
  std::vector<int> candidates;
  int action = -1;
  ChildFate down_fate = ChildFate::kOpen;
  ChildFate up_fate = ChildFate::kOpen;
  bool both_children_pruned = false;
};

struct SolveReport {
  std::string instance_name;
  std::string policy_name;
  uint64_t seed = 0;
  SolveStatus status = SolveStatus::kNumericalError;
  double objective = kInfinity;  // incumbent, +inf when none was found
  double best_bound = -kInfinity;
  int64_t node_count = 0;
  int64_t lp_iterations = 0;
  std::vector<DecisionRecord> decisions;
  std::vector<BipartiteGraph> graphs;
  std::vector<double> solution;
  double wall_time_seconds = 0.0;

  // Line-based trace; the wall-time line can be omitted for diffing.
  void write_trace(std::ostream& out, bool include_wall_time = true) const;
  static std::string csv_header();
  std::string csv_row() const;
};

// Open-node container. Best-bound mode pops the lowest LP bound, breaking
// ties by depth (deeper first) and then insertion order; depth-first mode
// pops the most recently pushed node.
class OpenNodeQueue {
 public:
  explicit OpenNodeQueue(NodeSelection selection) : selection_(selection) {}

  void push(SearchNode node);
  SearchNode pop();
  bool empty() const { return live_ == 0; }
  size_t size() const { return live_; }
  double min_bound() const;  // +inf when empty

 private:
  using Key = std::tuple<double, int, int64_t>;  // bound, -depth, sequence

  NodeSelection selection_;
  int64_t sequence_ = 0;
  size_t live_ = 0;
  std::vector<SearchNode> slots_;
  std::vector<size_t> free_slots_;
  std::set<std::pair<Key, size_t>> order_;  // best-bound mode
  std::vector<size_t> stack_;               // depth-first mode
  std::multiset<double> bounds_;
};

// Runs branch-and-bound to completion or to a configured limit.
SolveReport solve(const MilpInstance& instance, BranchingPolicy& policy,
                  const BnbConfig& config = {});

}  // namespace revibranch

#endif  // REVIBRANCH_BNB_H_
