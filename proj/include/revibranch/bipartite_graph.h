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

#ifndef REVIBRANCH_BIPARTITE_GRAPH_H_
#define REVIBRANCH_BIPARTITE_GRAPH_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "revibranch/milp.h"
#include "revibranch/pseudocost.h"
#include "revibranch/simplex.h"

namespace revibranch {

// Column layout of BipartiteGraph::constraint_features.
enum ConstraintFeature : int {
  kConsRhs = 0,        // b_i / ||A_i||
  kConsSlack,          // (b_i - A_i x*) / ||A_i||
  kConsDual,           // y_i ||A_i|| / max|c|
  kConsRowNorm,        // ||A_i|| / max_k ||A_k||
  kConsTight,          // slack within tolerance
  kNumConstraintFeatures
};

// Column layout of BipartiteGraph::variable_features.
enum VariableFeature : int {
  kVarObjective = 0,     // c_j / max|c|
  kVarLpValue,           // x*_j
  kVarFractionality,     // |x*_j - round(x*_j)|
  kVarDistLower,         // x*_j - l'_j (0 if unbounded)
  kVarDistUpper,         // u'_j - x*_j (0 if unbounded)
  kVarAtBound,           // 1 if x*_j sits on l'_j or u'_j
  kVarReducedCost,       // d_j / max|c|
  kVarBasic,             // 1 if basic
  kVarTypeBinary,        // one-hot type
  kVarTypeInteger,
  kVarTypeContinuous,
  kVarColumnNorm,        // ||A_.j|| / max_k ||A_.k||
  kVarColumnNnz,         // nnz(A_.j) / m
  kVarPseudocostUp,      // psi+_j f+_j / max|c|
  kVarPseudocostDown,    // psi-_j f-_j / max|c|
  kVarTimesBranched,     // count_j / (1 + total decisions)
  kVarRootLpValue,       // root x*_j
  kVarDepthFractionality,  // fractionality / (1 + depth)
  kVarCandidate,         // 1 if in the candidate set
  kNumVariableFeatures
};

static_assert(kNumConstraintFeatures == 5);
static_assert(kNumVariableFeatures == 19);

// Branching state: constraint and variable nodes joined at A_ij != 0.
struct BipartiteGraph {
  int num_constraints = 0;
  int num_variables = 0;
  std::vector<double> constraint_features;  // row-major m x 5
  std::vector<double> variable_features;    // row-major n x 19
  std::vector<int> edge_constraint;
  std::vector<int> edge_variable;
  std::vector<double> edge_coefficient;  // A_ij / ||A_i||
  std::vector<uint8_t> candidate_mask;

  int num_edges() const { return static_cast<int>(edge_constraint.size()); }
  double constraint_feature(int i, int f) const {
    return constraint_features[i * kNumConstraintFeatures + f];
  }
  double variable_feature(int j, int f) const {
    return variable_features[j * kNumVariableFeatures + f];
  }
  std::vector<int> candidates() const;
  int num_candidates() const;

  // Throws std::invalid_argument on shape mismatch or non-finite entries.
  void validate() const;

  void serialize(std::ostream& out) const;
  static BipartiteGraph deserialize(std::istream& in);

  bool operator==(const BipartiteGraph&) const = default;
};

// Search-tree context for features that depend on more than one LP.
struct NodeStats {
  int depth = 0;
  std::span<const double> lower;        // node bounds; empty = instance
  std::span<const double> upper;
  std::span<const double> root_values;  // empty = use current x*
  const PseudocostTable* pseudocosts = nullptr;
  std::span<const int> branch_counts;   // empty = zeros
  int total_decisions = 0;
};

// Builds the state graph for an optimal node LP. Throws std::invalid_argument
// if `lp` is not optimal.
BipartiteGraph build_bipartite_graph(const MilpInstance& instance,
                                     const LpSolution& lp,
                                     const NodeStats& stats = {});

// Fractional integer variables: j in I with |x_j - round(x_j)| > 1e-6.
std::vector<int> fractional_candidates(const MilpInstance& instance,
                                       std::span<const double> values);

}  // namespace revibranch

#endif  // REVIBRANCH_BIPARTITE_GRAPH_H_
