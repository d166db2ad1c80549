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

#include "revibranch/policies.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace revibranch {

namespace {

constexpr double kTieTolerance = 1e-12;

void require_candidates(const BipartiteGraph& graph) {
  if (graph.num_candidates() == 0) {
    throw std::invalid_argument("branching requested with no candidates");
  }
}

}  // namespace

double product_score(double down_gain, double up_gain) {
  return std::max(down_gain, kScoreEpsilon) * std::max(up_gain, kScoreEpsilon);
}

int random_choice(const BipartiteGraph& graph, Rng& rng) {
  const std::vector<int> candidates = graph.candidates();
  if (candidates.empty()) {
    throw std::invalid_argument("branching requested with no candidates");
  }
  const int64_t pick =
      rng.uniform_int(0, static_cast<int64_t>(candidates.size()) - 1);
  return candidates[pick];
}

int most_fractional_choice(const BipartiteGraph& graph) {
  require_candidates(graph);
  int best = -1;
  double best_score = -1.0;
  for (int j = 0; j < graph.num_variables; ++j) {
    if (!graph.candidate_mask[j]) continue;
    const double score = graph.variable_feature(j, kVarFractionality);
    // 0.1 and 0.9 must tie despite rounding in |x - round(x)|.
    if (score > best_score + kTieTolerance) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

void RandomPolicy::reset(const MilpInstance&, uint64_t seed) {
  rng_ = Rng(mix_seed(seed, 0x52414e44));
}

BranchChoice RandomPolicy::choose(const BranchingContext& context) {
  return {random_choice(context.graph, rng_), 0};
}

BranchChoice MostFractionalPolicy::choose(const BranchingContext& context) {
  return {most_fractional_choice(context.graph), 0};
}

StrongBranchResult strong_branch(const BranchingContext& context, int var) {
  StrongBranchResult result;
  const SearchNode& node = context.node;
  const double value = node.lp.values[var];
  const double parent = node.lp.objective_value;
  for (int side = 0; side < 2; ++side) {
    const BranchDirection dir =
        side == 0 ? BranchDirection::kDown : BranchDirection::kUp;
    const LpProblem child = tighten_bound(node.problem, var, dir, value);
    double gain = kInfeasibleGain;
    bool feasible = false;
    if (!child.infeasible_by_bounds) {
      const LpSolution lp = context.lp_solver.solve(child, &node.lp.basis);
      result.iterations += lp.iterations;
      switch (lp.status) {
        case LpStatus::kOptimal:
          gain = std::max(0.0, lp.objective_value - parent);
          feasible = true;
          break;
        case LpStatus::kInfeasible:
          break;
        case LpStatus::kUnbounded:
        case LpStatus::kNumericallyUnstable:
          gain = 0.0;
          break;
      }
    }
    if (side == 0) {
      result.down_gain = gain;
      result.down_feasible = feasible;
    } else {
      result.up_gain = gain;
      result.up_feasible = feasible;
    }
  }
  return result;
}

BranchChoice StrongBranchingPolicy::choose(const BranchingContext& context) {
  require_candidates(context.graph);
  BranchChoice choice;
  double best_score = -1.0;
  for (int j = 0; j < context.graph.num_variables; ++j) {
    if (!context.graph.candidate_mask[j]) continue;
    const StrongBranchResult probe = strong_branch(context, j);
    choice.extra_lp_iterations += probe.iterations;
    const double score = product_score(probe.down_gain, probe.up_gain);
    if (score > best_score) {
      best_score = score;
      choice.variable = j;
    }
  }
  return choice;
}

int pseudocost_choice(const PseudocostTable& table,
                      const BipartiteGraph& graph) {
  require_candidates(graph);
  if (table.empty()) return most_fractional_choice(graph);
  int best = -1;
  double best_score = -1.0;
  for (int j = 0; j < graph.num_variables; ++j) {
    if (!graph.candidate_mask[j]) continue;
    const double x = graph.variable_feature(j, kVarLpValue);
    const double down = table.estimate(j, BranchDirection::kDown, 1.0) *
                        (x - std::floor(x));
    const double up =
        table.estimate(j, BranchDirection::kUp, 1.0) * (std::ceil(x) - x);
    const double score = product_score(down, up);
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

void update_pseudocosts(PseudocostTable& table, const BranchOutcome& outcome) {
  const double down_fraction = outcome.value - std::floor(outcome.value);
  const double up_fraction = std::ceil(outcome.value) - outcome.value;
  if (outcome.down_feasible && down_fraction > 0.0) {
    table.update(outcome.variable, BranchDirection::kDown,
                 std::max(0.0, outcome.down_objective - outcome.parent_objective),
                 down_fraction);
  }
  if (outcome.up_feasible && up_fraction > 0.0) {
    table.update(outcome.variable, BranchDirection::kUp,
                 std::max(0.0, outcome.up_objective - outcome.parent_objective),
                 up_fraction);
  }
}

void PseudocostPolicy::reset(const MilpInstance& instance, uint64_t) {
  table_.reset(instance.num_variables());
}

BranchChoice PseudocostPolicy::choose(const BranchingContext& context) {
  BranchChoice choice;
  if (options_.strong_init) {
    for (int j : context.graph.candidates()) {
      if (table_.initialized(j, BranchDirection::kDown) &&
          table_.initialized(j, BranchDirection::kUp)) {
        continue;
      }
      const StrongBranchResult probe = strong_branch(context, j);
      choice.extra_lp_iterations += probe.iterations;
      BranchOutcome outcome;
      outcome.variable = j;
      outcome.value = context.node.lp.values[j];
      outcome.parent_objective = context.node.lp.objective_value;
      outcome.down_feasible = probe.down_feasible;
      outcome.up_feasible = probe.up_feasible;
      outcome.down_objective = outcome.parent_objective + probe.down_gain;
      outcome.up_objective = outcome.parent_objective + probe.up_gain;
      update_pseudocosts(table_, outcome);
    }
  }
  choice.variable = pseudocost_choice(table_, context.graph);
  return choice;
}

void PseudocostPolicy::observe(const BranchOutcome& outcome) {
  update_pseudocosts(table_, outcome);
}

std::unique_ptr<BranchingPolicy> make_classic_policy(const std::string& name) {
  if (name == "random") return std::make_unique<RandomPolicy>();
  if (name == "mostfrac") return std::make_unique<MostFractionalPolicy>();
  if (name == "pb") return std::make_unique<PseudocostPolicy>();
  if (name == "pb-warm") {
    return std::make_unique<PseudocostPolicy>(PseudocostPolicy::Options{true});
  }
  if (name == "sb") return std::make_unique<StrongBranchingPolicy>();
  throw std::invalid_argument("unknown policy '" + name + "'");
}

}  // namespace revibranch
