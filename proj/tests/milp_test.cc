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
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"
#include "revibranch/bipartite_graph.h"
#include "revibranch/generators.h"
#include "revibranch/instance_io.h"
#include "revibranch/simplex.h"

namespace revibranch {
namespace {

MilpInstance tiny_instance() {
  MilpInstance instance;
  instance.name = "tiny";
  instance.objective = {-1.5};
  instance.add_row({0}, {2.0}, 3.0);
  instance.lower_bounds = {0.0};
  instance.upper_bounds = {kInfinity};
  instance.integer_set = {0};
  return instance;
}

TEST(GeneratorTest, SetCoveringFullDensity) {
  const MilpInstance instance = generate_set_covering(2, 3, 1.0, 5);
  EXPECT_EQ(instance.num_constraints(), 2);
  EXPECT_EQ(instance.num_variables(), 3);
  EXPECT_EQ(instance.num_nonzeros(), 6);
  for (int j = 0; j < 3; ++j) {
    EXPECT_EQ(instance.lower_bounds[j], 0.0);
    EXPECT_EQ(instance.upper_bounds[j], 1.0);
    EXPECT_GE(instance.objective[j], 1.0);
    EXPECT_LE(instance.objective[j], 100.0);
    EXPECT_EQ(instance.objective[j], std::round(instance.objective[j]));
  }
}

TEST(GeneratorTest, SetCoveringRowsHaveTwoEntries) {
  const MilpInstance instance = generate_set_covering(200, 400, 0.05, 1);
  EXPECT_EQ(instance.num_constraints(), 200);
  EXPECT_EQ(instance.num_variables(), 400);
  for (const SparseRow& row : instance.rows) {
    EXPECT_GE(row.columns.size(), 2u);
    EXPECT_EQ(row.rhs, -1.0);
  }
}

TEST(GeneratorTest, SetCoveringRejectsImpossibleDensity) {
  EXPECT_THROW(generate_set_covering(5, 3, 1e-6, 1), std::invalid_argument);
  EXPECT_THROW(generate_set_covering(5, 3, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(generate_set_covering(0, 3, 0.5, 1), std::invalid_argument);
}

TEST(GeneratorTest, SetCoveringMatchesBruteForceLpBound) {
  const MilpInstance instance = generate_set_covering(5, 8, 0.4, 7);
  const auto optimum = testing::brute_force_optimum(instance);
  ASSERT_TRUE(optimum.has_value());
  const auto relaxation = testing::relaxation_oracle(instance);
  ASSERT_TRUE(relaxation.feasible);
  EXPECT_LE(relaxation.objective, *optimum + 1e-9);
}

TEST(GeneratorTest, AuctionSingleItem) {
  const MilpInstance instance = generate_combinatorial_auction(1, 2, 9);
  EXPECT_EQ(instance.num_constraints(), 1);
  EXPECT_EQ(instance.num_variables(), 2);
  for (double c : instance.objective) EXPECT_LT(c, 0.0);
}

TEST(GeneratorTest, AuctionEasyScale) {
  const MilpInstance instance = generate_combinatorial_auction(20, 60, 3);
  EXPECT_EQ(instance.num_variables(), 60);
  EXPECT_LE(instance.num_constraints(), 20);
  for (const SparseRow& row : instance.rows) EXPECT_EQ(row.rhs, 1.0);
}

TEST(GeneratorTest, FacilityCapacityCoversDemand) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const MilpInstance instance = generate_facility_location(4, 6, seed);
    // Row 4 + f is the capacity row of facility f: -s_f y_f + sum d_c x_fc.
    double capacity = 0.0;
    double demand = 0.0;
    for (int f = 0; f < 4; ++f) {
      const SparseRow& row = instance.rows[6 + f];
      capacity += -row.coefficients[0];
      if (f == 0) {
        for (size_t k = 1; k < row.coefficients.size(); ++k) demand += row.coefficients[k];
      }
    }
    EXPECT_GE(capacity, 1.2 * demand);
    EXPECT_EQ(instance.integer_set.size(), 4u);
  }
}

TEST(GeneratorTest, FacilitySingleFacilityOpens) {
  const MilpInstance instance = generate_facility_location(1, 1, 4);
  const auto optimum = testing::brute_force_optimum(instance);
  ASSERT_TRUE(optimum.has_value());
  // Only design: open facility 0, assign the customer fully.
  EXPECT_DOUBLE_EQ(*optimum, instance.objective[0] + instance.objective[1]);
}

TEST(GeneratorTest, Deterministic) {
  EXPECT_EQ(instance_to_string(generate_set_covering(30, 60, 0.1, 42)),
            instance_to_string(generate_set_covering(30, 60, 0.1, 42)));
  EXPECT_EQ(instance_to_string(generate_combinatorial_auction(10, 30, 42)),
            instance_to_string(generate_combinatorial_auction(10, 30, 42)));
  EXPECT_EQ(instance_to_string(generate_facility_location(5, 8, 42)),
            instance_to_string(generate_facility_location(5, 8, 42)));
  EXPECT_NE(instance_to_string(generate_set_covering(30, 60, 0.1, 42)),
            instance_to_string(generate_set_covering(30, 60, 0.1, 43)));
}

TEST(InstanceIoTest, TrivialRoundTrip) {
  const MilpInstance instance = tiny_instance();
  EXPECT_EQ(instance_from_string(instance_to_string(instance)), instance);
}

TEST(InstanceIoTest, LargeRoundTripIsBitExact) {
  MilpInstance instance = generate_set_covering(200, 400, 0.05, 11);
  // Non-representable decimals exercise shortest round-trip formatting.
  instance.objective[0] = 0.1 + 0.2;
  instance.rows[3].coefficients[0] = -1.0 / 3.0;
  const std::string text = instance_to_string(instance);
  const MilpInstance back = instance_from_string(text);
  EXPECT_EQ(back, instance);
  EXPECT_EQ(instance_to_string(back), text);
}

TEST(InstanceIoTest, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "revibranch_io_test.milp";
  const MilpInstance instance = generate_facility_location(3, 4, 2);
  write_instance(instance, path);
  EXPECT_EQ(read_instance(path), instance);
  std::filesystem::remove(path);
}

TEST(InstanceIoTest, RejectsCrossedBounds) {
  const std::string text =
      "milp 1 1\nname x\nobj 1\nrow 1 0 1 <= 1\nbounds 0 2 1\nint 1 0\n";
  try {
    instance_from_string(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5);
  }
}

TEST(InstanceIoTest, ReportsLineOfMalformedRow) {
  const std::string text =
      "milp 2 1\nname x\nobj 1 2\n\nrow 2 0 1 1 <= 3\nbounds 0 0 1\nbounds 1 0 1\nint 0\n";
  try {
    instance_from_string(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5);
  }
  EXPECT_THROW(instance_from_string("milp 1 0\nname x\nobj abc\n"), ParseError);
  EXPECT_THROW(instance_from_string("milp 1 0\nname x\n"), ParseError);
}

TEST(BipartiteGraphTest, EdgesEqualNonzeros) {
  MilpInstance instance;
  instance.objective = {1.0, 1.0, 1.0};
  instance.add_row({0, 1}, {1.0, 2.0}, 4.0);
  instance.add_row({1, 2}, {3.0, 1.0}, 5.0);
  instance.lower_bounds.assign(3, 0.0);
  instance.upper_bounds.assign(3, 1.0);
  instance.integer_set = {0, 1, 2};
  SimplexSolver solver(instance);
  const LpSolution lp = solver.solve(LpProblem::root(instance));
  ASSERT_TRUE(lp.optimal());
  const BipartiteGraph graph = build_bipartite_graph(instance, lp);
  EXPECT_EQ(graph.num_edges(), 4);
  EXPECT_EQ(graph.constraint_features.size(), 2u * 5u);
  EXPECT_EQ(graph.variable_features.size(), 3u * 19u);
}

TEST(BipartiteGraphTest, RejectsNonOptimalLp) {
  const MilpInstance instance = tiny_instance();
  LpSolution lp;
  lp.status = LpStatus::kInfeasible;
  EXPECT_THROW(build_bipartite_graph(instance, lp), std::invalid_argument);
}

TEST(BipartiteGraphTest, CandidateMaskMatchesIndependentRelaxation) {
  const MilpInstance instance = generate_set_covering(5, 8, 0.4, 7);
  SimplexSolver solver(instance);
  const LpSolution lp = solver.solve(LpProblem::root(instance));
  ASSERT_TRUE(lp.optimal());
  const BipartiteGraph graph = build_bipartite_graph(instance, lp);
  const auto oracle = testing::relaxation_oracle(instance);
  ASSERT_TRUE(oracle.feasible);
  EXPECT_NEAR(oracle.objective, lp.objective_value, 1e-7);
  // The LP optimum may be degenerate; compare masks only when the two
  // vertices agree, and always check the definition.
  bool same_vertex = true;
  for (int j = 0; j < instance.num_variables(); ++j) {
    same_vertex &= std::abs(oracle.x[j] - lp.values[j]) < 1e-7;
  }
  for (int j = 0; j < instance.num_variables(); ++j) {
    const bool fractional = std::abs(lp.values[j] - std::round(lp.values[j])) > 1e-6;
    EXPECT_EQ(graph.candidate_mask[j] != 0, fractional);
    if (same_vertex) {
      const bool oracle_fractional =
          std::abs(oracle.x[j] - std::round(oracle.x[j])) > 1e-6;
      EXPECT_EQ(graph.candidate_mask[j] != 0, oracle_fractional);
    }
  }
}

TEST(BipartiteGraphTest, FeaturesFiniteAndMaskWithinIntegers) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const MilpInstance instance = generate_facility_location(3, 5, seed);
    SimplexSolver solver(instance);
    const LpSolution lp = solver.solve(LpProblem::root(instance));
    ASSERT_TRUE(lp.optimal());
    const BipartiteGraph graph = build_bipartite_graph(instance, lp);
    EXPECT_NO_THROW(graph.validate());
    const std::vector<bool> integral = instance.integrality_mask();
    int count = 0;
    for (int j = 0; j < graph.num_variables; ++j) {
      if (graph.candidate_mask[j]) {
        EXPECT_TRUE(integral[j]);
        ++count;
      }
    }
    EXPECT_EQ(count, static_cast<int>(fractional_candidates(instance, lp.values).size()));
  }
}

TEST(BipartiteGraphTest, SerializeRoundTrip) {
  const MilpInstance instance = generate_combinatorial_auction(6, 10, 3);
  SimplexSolver solver(instance);
  const LpSolution lp = solver.solve(LpProblem::root(instance));
  const BipartiteGraph graph = build_bipartite_graph(instance, lp);
  std::stringstream buffer;
  graph.serialize(buffer);
  EXPECT_EQ(BipartiteGraph::deserialize(buffer), graph);
}

}  // namespace
}  // namespace revibranch
