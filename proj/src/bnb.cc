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

#include "revibranch/bnb.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "revibranch/instance_io.h"
#include "revibranch/pseudocost.h"

namespace revibranch {

namespace {

// Nodes whose bound is not below incumbent - kPruneSlack are fathomed.
constexpr double kPruneSlack = 1e-9;

std::string fate_name(ChildFate fate) {
  switch (fate) {
    case ChildFate::kInfeasible:
      return "infeasible";
    case ChildFate::kBoundPruned:
      return "bound";
    case ChildFate::kIntegral:
      return "integral";
    case ChildFate::kOpen:
      return "open";
  }
  return "?";
}

class Engine {
 public:
  Engine(const MilpInstance& instance, BranchingPolicy& policy,
         const BnbConfig& config)
      : instance_(instance),
        policy_(policy),
        config_(config),
        solver_(instance),
        open_(config.node_selection),
        pseudocosts_(instance.num_variables()),
        branch_counts_(instance.num_variables(), 0) {}

  SolveReport run();

 private:
  LpSolution solve_lp(const LpProblem& problem, const Basis* warm);
  void update_incumbent(const LpSolution& lp);
  bool limits_hit() const;

  const MilpInstance& instance_;
  BranchingPolicy& policy_;
  const BnbConfig& config_;
  SimplexSolver solver_;
  OpenNodeQueue open_;
  PseudocostTable pseudocosts_;
  std::vector<int> branch_counts_;
  std::vector<double> root_values_;
  std::vector<int> history_;
  SolveReport report_;
  int64_t next_id_ = 0;
  bool numerical_trouble_ = false;
  std::chrono::steady_clock::time_point start_;
};

LpSolution Engine::solve_lp(const LpProblem& problem, const Basis* warm) {
  LpSolution lp = solver_.solve(problem, config_.warm_start ? warm : nullptr);
  report_.lp_iterations += lp.iterations;
  if (lp.status == LpStatus::kNumericallyUnstable && warm != nullptr &&
      config_.warm_start) {
    lp = solver_.solve(problem, nullptr);
    report_.lp_iterations += lp.iterations;
  }
  return lp;
}

void Engine::update_incumbent(const LpSolution& lp) {
  std::vector<double> x = lp.values;
  for (int j : instance_.integer_set) x[j] = std::round(x[j]);
  const double value = objective_value(instance_, x);
  if (value < report_.objective) {
    report_.objective = value;
    report_.solution = std::move(x);
  }
}

bool Engine::limits_hit() const {
  if (report_.node_count >= config_.node_limit) return true;
  if (std::isfinite(config_.time_limit_seconds)) {
    const double elapsed = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start_)
                               .count();
    if (elapsed >= config_.time_limit_seconds) return true;
  }
  return false;
}

SolveReport Engine::run() {
  start_ = std::chrono::steady_clock::now();
  report_.instance_name = instance_.name;
  report_.policy_name = policy_.name();
  report_.seed = config_.seed;
  policy_.reset(instance_, config_.seed);

  SearchNode root;
  root.id = next_id_++;
  root.problem = LpProblem::root(instance_);
  root.lp = solve_lp(root.problem, nullptr);
  report_.node_count = 1;

  auto finish = [&](SolveStatus status) {
    report_.status = status;
    if (status == SolveStatus::kOptimal) {
      report_.best_bound = report_.objective;
    } else if (status == SolveStatus::kInfeasible) {
      report_.best_bound = kInfinity;
    } else if (status == SolveStatus::kLimit ||
               status == SolveStatus::kNumericalError) {
      report_.best_bound = std::min(open_.min_bound(), report_.objective);
    }
    report_.wall_time_seconds = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - start_)
                                    .count();
    return std::move(report_);
  };

  switch (root.lp.status) {
    case LpStatus::kInfeasible:
      return finish(SolveStatus::kInfeasible);
    case LpStatus::kUnbounded:
      report_.objective = -kInfinity;
      report_.best_bound = -kInfinity;
      return finish(SolveStatus::kUnbounded);
    case LpStatus::kNumericallyUnstable:
      return finish(SolveStatus::kNumericalError);
    case LpStatus::kOptimal:
      break;
  }
  root_values_ = root.lp.values;
  if (fractional_candidates(instance_, root.lp.values).empty()) {
    update_incumbent(root.lp);
    return finish(SolveStatus::kOptimal);
  }
  open_.push(std::move(root));

  while (!open_.empty()) {
    if (open_.min_bound() >= report_.objective - kPruneSlack) break;
    if (limits_hit()) return finish(SolveStatus::kLimit);

    SearchNode node = open_.pop();
    if (node.lp.objective_value >= report_.objective - kPruneSlack) continue;

    NodeStats stats;
    stats.depth = node.depth;
    stats.lower = node.problem.lower;
    stats.upper = node.problem.upper;
    stats.root_values = root_values_;
    stats.pseudocosts = &pseudocosts_;
    stats.branch_counts = branch_counts_;
    stats.total_decisions = static_cast<int>(report_.decisions.size());
    BipartiteGraph graph = build_bipartite_graph(instance_, node.lp, stats);

    DecisionRecord record;
    record.node_id = node.id;
    record.depth = node.depth;
    record.candidates = graph.candidates();

    const BranchingContext context{instance_, node, graph, history_, solver_};
    const BranchChoice choice = policy_.choose(context);
    report_.lp_iterations += choice.extra_lp_iterations;
    const int var = choice.variable;
    if (var < 0 || var >= graph.num_variables || !graph.candidate_mask[var]) {
      throw std::logic_error("policy '" + policy_.name() +
                             "' chose a non-candidate variable " +
                             std::to_string(var));
    }
    record.action = var;
    if (config_.record_graphs) {
      record.graph_id = static_cast<int>(report_.graphs.size());
      report_.graphs.push_back(std::move(graph));
    }
    history_.push_back(var);
    ++branch_counts_[var];

    const double value = node.lp.values[var];
    BranchOutcome outcome;
    outcome.variable = var;
    outcome.value = value;
    outcome.parent_objective = node.lp.objective_value;

    ChildFate fates[2];
    for (int side = 0; side < 2; ++side) {
      const BranchDirection dir =
          side == 0 ? BranchDirection::kDown : BranchDirection::kUp;
      SearchNode child;
      child.id = next_id_++;
      child.parent_id = node.id;
      child.depth = node.depth + 1;
      child.branch_var = var;
      child.branch_dir = dir;
      child.problem = tighten_bound(node.problem, var, dir, value);
      ++report_.node_count;

      ChildFate fate;
      if (child.problem.infeasible_by_bounds) {
        fate = ChildFate::kInfeasible;
      } else {
        child.lp = solve_lp(child.problem, &node.lp.basis);
        if (child.lp.status == LpStatus::kNumericallyUnstable) {
          numerical_trouble_ = true;
          fate = ChildFate::kInfeasible;
        } else if (child.lp.status != LpStatus::kOptimal) {
          fate = ChildFate::kInfeasible;
        } else {
          const double obj = child.lp.objective_value;
          if (side == 0) {
            outcome.down_feasible = true;
            outcome.down_objective = obj;
          } else {
            outcome.up_feasible = true;
            outcome.up_objective = obj;
          }
          if (obj >= report_.objective - kPruneSlack) {
            fate = ChildFate::kBoundPruned;
          } else if (fractional_candidates(instance_, child.lp.values).empty()) {
            update_incumbent(child.lp);
            fate = ChildFate::kIntegral;
          } else {
            fate = ChildFate::kOpen;
            open_.push(std::move(child));
          }
        }
      }
      fates[side] = fate;
    }
    record.down_fate = fates[0];
    record.up_fate = fates[1];
    record.both_children_pruned = detect_pruned_children(fates[0], fates[1]);
    report_.decisions.push_back(std::move(record));

    const double down_fraction = value - std::floor(value);
    const double up_fraction = std::ceil(value) - value;
    if (outcome.down_feasible) {
      pseudocosts_.update(var, BranchDirection::kDown,
                          std::max(0.0, outcome.down_objective - outcome.parent_objective),
                          down_fraction);
    }
    if (outcome.up_feasible) {
      pseudocosts_.update(var, BranchDirection::kUp,
                          std::max(0.0, outcome.up_objective - outcome.parent_objective),
                          up_fraction);
    }
    policy_.observe(outcome);
  }

  if (numerical_trouble_) return finish(SolveStatus::kNumericalError);
  if (!std::isfinite(report_.objective)) return finish(SolveStatus::kInfeasible);
  return finish(SolveStatus::kOptimal);
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kLimit:
      return "limit";
    case SolveStatus::kNumericalError:
      return "numerical_error";
  }
  return "unknown";
}

bool detect_pruned_children(ChildFate down, ChildFate up) {
  return down != ChildFate::kOpen && up != ChildFate::kOpen;
}

void OpenNodeQueue::push(SearchNode node) {
  const double bound = node.lp.objective_value;
  const int depth = node.depth;
  size_t slot;
  if (!free_slots_.empty()) {
    slot = free_slots_.back();
    free_slots_.pop_back();
    slots_[slot] = std::move(node);
  } else {
    slot = slots_.size();
    slots_.push_back(std::move(node));
  }
  if (selection_ == NodeSelection::kBestBound) {
    order_.insert({Key{bound, -depth, sequence_++}, slot});
  } else {
    stack_.push_back(slot);
  }
  bounds_.insert(bound);
  ++live_;
}

SearchNode OpenNodeQueue::pop() {
  if (live_ == 0) throw std::logic_error("pop from empty node queue");
  size_t slot;
  if (selection_ == NodeSelection::kBestBound) {
    slot = order_.begin()->second;
    order_.erase(order_.begin());
  } else {
    slot = stack_.back();
    stack_.pop_back();
  }
  SearchNode node = std::move(slots_[slot]);
  slots_[slot] = SearchNode{};
  free_slots_.push_back(slot);
  bounds_.erase(bounds_.find(node.lp.objective_value));
  --live_;
  return node;
}

double OpenNodeQueue::min_bound() const {
  return bounds_.empty() ? kInfinity : *bounds_.begin();
}

void SolveReport::write_trace(std::ostream& out, bool include_wall_time) const {
  out << "report " << (instance_name.empty() ? "-" : instance_name) << '\n';
  out << "policy " << policy_name << '\n';
  out << "seed " << seed << '\n';
  out << "status " << to_string(status) << '\n';
  out << "objective " << format_double(objective) << '\n';
  out << "bound " << format_double(best_bound) << '\n';
  out << "nodes " << node_count << '\n';
  out << "lp_iterations " << lp_iterations << '\n';
  out << "decisions " << decisions.size() << '\n';
  for (size_t i = 0; i < decisions.size(); ++i) {
    const DecisionRecord& d = decisions[i];
    out << "decision " << i << " node " << d.node_id << " depth " << d.depth
        << " graph " << d.graph_id << " action " << d.action << " down "
        << fate_name(d.down_fate) << " up " << fate_name(d.up_fate)
        << " pruned " << (d.both_children_pruned ? 1 : 0) << " candidates "
        << d.candidates.size();
    for (int j : d.candidates) out << ' ' << j;
    out << '\n';
  }
  if (include_wall_time) out << "wall_time " << wall_time_seconds << '\n';
  out << "end\n";
}

std::string SolveReport::csv_header() {
  return "instance,policy,seed,status,objective,bound,nodes,lp_iterations,"
         "decisions,wall_time";
}

std::string SolveReport::csv_row() const {
  std::ostringstream out;
  out << instance_name << ',' << policy_name << ',' << seed << ','
      << to_string(status) << ',' << format_double(objective) << ','
      << format_double(best_bound) << ',' << node_count << ',' << lp_iterations
      << ',' << decisions.size() << ',' << wall_time_seconds;
  return out.str();
}

SolveReport solve(const MilpInstance& instance, BranchingPolicy& policy,
                  const BnbConfig& config) {
  instance.validate();
  if (config.node_limit <= 0 || !(config.time_limit_seconds > 0.0)) {
    throw std::invalid_argument("node and time limits must be positive");
  }
  Engine engine(instance, policy, config);
  return engine.run();
}

}  // namespace revibranch
