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

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.h"
#include "revibranch/bipartite_graph.h"
#include "revibranch/generators.h"
#include "revibranch/random.h"
#include "revibranch/simplex.h"

namespace revibranch {
namespace {

MilpInstance two_var_lp() {
  MilpInstance instance;
  instance.objective = {-3.0, -2.0};
  instance.add_row({0, 1}, {1.0, 1.0}, 1.5);
  instance.lower_bounds = {0.0, 0.0};
  instance.upper_bounds = {1.0, 1.0};
  return instance;
}

void expect_feasible(const MilpInstance& instance, const LpProblem& problem,
                     const LpSolution& lp) {
  ASSERT_TRUE(lp.optimal());
  for (const SparseRow& row : instance.rows) {
    double act = 0.0;
    for (size_t k = 0; k < row.columns.size(); ++k) {
      act += row.coefficients[k] * lp.values[row.columns[k]];
    }
    EXPECT_LE(act, row.rhs + 1e-7);
  }
  for (int j = 0; j < instance.num_variables(); ++j) {
    EXPECT_GE(lp.values[j], problem.lower[j] - 1e-9);
    EXPECT_LE(lp.values[j], problem.upper[j] + 1e-9);
  }
  const double reported = objective_value(instance, lp.values);
  EXPECT_NEAR(reported, lp.objective_value,
              1e-9 * std::max(1.0, std::abs(reported)));
}

TEST(SimplexTest, HandSolvedTwoVariableLp) {
  const MilpInstance instance = two_var_lp();
  SimplexSolver solver(instance);
  const LpProblem problem = LpProblem::root(instance);
  const LpSolution lp = solver.solve(problem);
  expect_feasible(instance, problem, lp);
  EXPECT_NEAR(lp.objective_value, -4.0, 1e-9);
  EXPECT_NEAR(lp.values[0], 1.0, 1e-9);
  EXPECT_NEAR(lp.values[1], 0.5, 1e-9);
}

TEST(SimplexTest, FixedAtOrigin) {
  MilpInstance instance;
  instance.objective = {1.0, -1.0};
  instance.add_row({0, 1}, {1.0, 1.0}, 2.0);
  instance.lower_bounds = {0.0, 0.0};
  instance.upper_bounds = {0.0, 0.0};
  SimplexSolver solver(instance);
  const LpSolution lp = solver.solve(LpProblem::root(instance));
  ASSERT_TRUE(lp.optimal());
  EXPECT_EQ(lp.objective_value, 0.0);
  EXPECT_EQ(lp.iterations, 0);
}

TEST(SimplexTest, EmptyPolytopeIsInfeasible) {
  MilpInstance instance;
  instance.objective = {1.0};
  instance.add_row({0}, {1.0}, -1.0);
  instance.lower_bounds = {0.0};
  instance.upper_bounds = {kInfinity};
  SimplexSolver solver(instance);
  EXPECT_EQ(solver.solve(LpProblem::root(instance)).status, LpStatus::kInfeasible);
}

TEST(SimplexTest, DetectsUnbounded) {
  MilpInstance instance;
  instance.objective = {-1.0, 0.0};
  instance.add_row({0, 1}, {1.0, -1.0}, 1.0);
  instance.lower_bounds = {0.0, 0.0};
  instance.upper_bounds = {kInfinity, kInfinity};
  SimplexSolver solver(instance);
  EXPECT_EQ(solver.solve(LpProblem::root(instance)).status, LpStatus::kUnbounded);
}

TEST(SimplexTest, FreeVariable) {
  // min x s.t. -x <= 3, x free -> x = -3.
  MilpInstance instance;
  instance.objective = {1.0};
  instance.add_row({0}, {-1.0}, 3.0);
  instance.lower_bounds = {-kInfinity};
  instance.upper_bounds = {kInfinity};
  SimplexSolver solver(instance);
  const LpSolution lp = solver.solve(LpProblem::root(instance));
  ASSERT_TRUE(lp.optimal());
  EXPECT_NEAR(lp.values[0], -3.0, 1e-9);
}

TEST(TightenBoundTest, FloorAndCeil) {
  MilpInstance instance;
  instance.objective.assign(4, 1.0);
  instance.add_row({0, 1, 2, 3}, {1.0, 1.0, 1.0, 1.0}, 10.0);
  instance.lower_bounds.assign(4, 0.0);
  instance.upper_bounds.assign(4, 5.0);
  instance.integer_set = {0, 1, 2, 3};
  const LpProblem root = LpProblem::root(instance);
  const LpProblem down = tighten_bound(root, 3, BranchDirection::kDown, 2.4);
  const LpProblem up = tighten_bound(root, 3, BranchDirection::kUp, 2.4);
  EXPECT_EQ(down.upper[3], 2.0);
  EXPECT_EQ(down.lower[3], 0.0);
  EXPECT_EQ(up.lower[3], 3.0);
  EXPECT_EQ(up.upper[3], 5.0);
  EXPECT_EQ(root.upper[3], 5.0);
  EXPECT_EQ(root.lower[3], 0.0);
}

TEST(TightenBoundTest, BinaryHalf) {
  const MilpInstance instance = two_var_lp();
  const LpProblem root = LpProblem::root(instance);
  const LpProblem down = tighten_bound(root, 1, BranchDirection::kDown, 0.5);
  const LpProblem up = tighten_bound(root, 1, BranchDirection::kUp, 0.5);
  EXPECT_EQ(down.lower[1], 0.0);
  EXPECT_EQ(down.upper[1], 0.0);
  EXPECT_EQ(up.lower[1], 1.0);
  EXPECT_EQ(up.upper[1], 1.0);
}

TEST(TightenBoundTest, CrossingMarksInfeasible) {
  const MilpInstance instance = two_var_lp();
  const LpProblem root = LpProblem::root(instance);
  const LpProblem up = tighten_bound(root, 0, BranchDirection::kUp, 1.5);
  EXPECT_TRUE(up.infeasible_by_bounds);
  EXPECT_FALSE(root.infeasible_by_bounds);
}

// Random LPs against the independent tableau oracle.
TEST(SimplexTest, MatchesTableauOracleOnRandomLps) {
  Rng rng(1234);
  int solved = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 8));
    const int m = static_cast<int>(rng.uniform_int(1, 8));
    MilpInstance instance;
    for (int j = 0; j < n; ++j) {
      instance.objective.push_back(std::round(rng.uniform(-10, 10)));
      const double lo = std::round(rng.uniform(-3, 1));
      instance.lower_bounds.push_back(lo);
      instance.upper_bounds.push_back(lo + std::round(rng.uniform(0, 5)));
    }
    for (int i = 0; i < m; ++i) {
      std::vector<int> cols;
      std::vector<double> coefs;
      for (int j = 0; j < n; ++j) {
        if (rng.bernoulli(0.6)) {
          double v = std::round(rng.uniform(-5, 5));
          if (v == 0.0) v = 1.0;
          cols.push_back(j);
          coefs.push_back(v);
        }
      }
      if (cols.empty()) {
        cols.push_back(0);
        coefs.push_back(1.0);
      }
      instance.add_row(cols, coefs, std::round(rng.uniform(-4, 10)));
    }
    SimplexSolver solver(instance);
    const LpProblem problem = LpProblem::root(instance);
    const LpSolution lp = solver.solve(problem);
    const testing::OracleLp oracle = testing::relaxation_oracle(instance);
    ASSERT_EQ(lp.optimal(), oracle.feasible) << "trial " << trial;
    if (!oracle.feasible) {
      EXPECT_EQ(lp.status, LpStatus::kInfeasible);
      continue;
    }
    ++solved;
    expect_feasible(instance, problem, lp);
    EXPECT_NEAR(lp.objective_value, oracle.objective, 1e-7) << "trial " << trial;
    for (double d : lp.duals) EXPECT_LE(d, 1e-7);
  }
  EXPECT_GT(solved, 100);
}

TEST(SimplexTest, ColdResolveIsReproducible) {
  const MilpInstance instance = generate_set_covering(40, 80, 0.1, 5);
  SimplexSolver a(instance);
  SimplexSolver b(instance);
  const LpSolution first = a.solve(LpProblem::root(instance));
  const LpSolution second = b.solve(LpProblem::root(instance));
  const LpSolution third = a.solve(LpProblem::root(instance));
  ASSERT_TRUE(first.optimal());
  EXPECT_EQ(first.iterations, second.iterations);
  EXPECT_EQ(first.iterations, third.iterations);
  EXPECT_EQ(first.objective_value, second.objective_value);
  EXPECT_EQ(first.values, third.values);
}

TEST(SimplexTest, WarmStartAgreesWithColdAndChildDominatesParent) {
  for (uint64_t seed = 0; seed < 15; ++seed) {
    const MilpInstance instance =
        seed % 3 == 0   ? generate_set_covering(30, 60, 0.1, seed)
        : seed % 3 == 1 ? generate_combinatorial_auction(10, 30, seed)
                        : generate_facility_location(4, 6, seed);
    SimplexSolver solver(instance);
    const LpProblem root = LpProblem::root(instance);
    const LpSolution parent = solver.solve(root);
    ASSERT_TRUE(parent.optimal());
    for (int j : fractional_candidates(instance, parent.values)) {
      for (BranchDirection dir : {BranchDirection::kDown, BranchDirection::kUp}) {
        const LpProblem child = tighten_bound(root, j, dir, parent.values[j]);
        if (child.infeasible_by_bounds) continue;
        const LpSolution cold = solver.solve(child);
        const LpSolution warm = solver.solve(child, &parent.basis);
        ASSERT_EQ(cold.status, warm.status);
        if (!cold.optimal()) continue;
        expect_feasible(instance, child, warm);
        EXPECT_NEAR(cold.objective_value, warm.objective_value, 1e-7);
        EXPECT_GE(cold.objective_value, parent.objective_value - 1e-7);
      }
    }
  }
}

}  // namespace
}  // namespace revibranch
