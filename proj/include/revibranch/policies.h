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

// Baseline branching rules: random, most-fractional, pseudocost, strong.

#ifndef REVIBRANCH_POLICIES_H_
#define REVIBRANCH_POLICIES_H_

#include <memory>
#include <string>

#include "revibranch/bnb.h"
#include "revibranch/pseudocost.h"
#include "revibranch/random.h"

namespace revibranch {

// Floor applied to both factors of product scores.
inline constexpr double kScoreEpsilon = 1e-6;
// Objective gain charged to an infeasible strong-branching child.
inline constexpr double kInfeasibleGain = 1e7;

double product_score(double down_gain, double up_gain);

// Uniform pick from the candidate set.
int random_choice(const BipartiteGraph& graph, Rng& rng);
// argmax_j min(f_j, 1 - f_j); ties go to the lowest index.
int most_fractional_choice(const BipartiteGraph& graph);

class RandomPolicy : public BranchingPolicy {
 public:
  std::string name() const override { return "random"; }
  void reset(const MilpInstance& instance, uint64_t seed) override;
  BranchChoice choose(const BranchingContext& context) override;

 private:
  Rng rng_;
};

class MostFractionalPolicy : public BranchingPolicy {
 public:
  std::string name() const override { return "mostfrac"; }
  BranchChoice choose(const BranchingContext& context) override;
};

// Solves both children of every candidate; gains are child objective minus
// node objective, infeasible children count kInfeasibleGain.
class StrongBranchingPolicy : public BranchingPolicy {
 public:
  std::string name() const override { return "sb"; }
  BranchChoice choose(const BranchingContext& context) override;
};

struct StrongBranchResult {
  double down_gain = 0.0;
  double up_gain = 0.0;
  bool down_feasible = false;
  bool up_feasible = false;
  int64_t iterations = 0;
};

// Child LP probe for one candidate, warm started from the node basis.
StrongBranchResult strong_branch(const BranchingContext& context, int var);

// score_j = max(psi-_j f-_j, eps) * max(psi+_j f+_j, eps). Uninitialized
// entries use the table-wide mean; an empty table falls back to
// most-fractional. With `strong_init`, candidates lacking a pseudocost in
// either direction are strong-branched first and the result seeds the table.
class PseudocostPolicy : public BranchingPolicy {
 public:
  struct Options {
    bool strong_init = false;
  };

  PseudocostPolicy() = default;
  explicit PseudocostPolicy(Options options) : options_(options) {}

  std::string name() const override {
    return options_.strong_init ? "pb-warm" : "pb";
  }
  void reset(const MilpInstance& instance, uint64_t seed) override;
  BranchChoice choose(const BranchingContext& context) override;
  void observe(const BranchOutcome& outcome) override;

  const PseudocostTable& table() const { return table_; }
  PseudocostTable& mutable_table() { return table_; }

 private:
  Options options_;
  PseudocostTable table_;
};

// Chooses from a PseudocostTable and a graph without touching an LP.
int pseudocost_choice(const PseudocostTable& table, const BipartiteGraph& graph);

// Records one branching's child gains (skipping infeasible children).
void update_pseudocosts(PseudocostTable& table, const BranchOutcome& outcome);

// "random", "mostfrac", "pb", "pb-warm", "sb".
std::unique_ptr<BranchingPolicy> make_classic_policy(const std::string& name);

}  // namespace revibranch

#endif  // REVIBRANCH_POLICIES_H_
