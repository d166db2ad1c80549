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

#include "revibranch/bipartite_graph.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "revibranch/binary_io.h"

namespace revibranch {

std::vector<int> BipartiteGraph::candidates() const {
  std::vector<int> out;
  for (int j = 0; j < num_variables; ++j) {
    if (candidate_mask[j]) out.push_back(j);
  }
  return out;
}

int BipartiteGraph::num_candidates() const {
  return static_cast<int>(
      std::count(candidate_mask.begin(), candidate_mask.end(), uint8_t{1}));
}

void BipartiteGraph::validate() const {
  if (constraint_features.size() !=
          static_cast<size_t>(num_constraints) * kNumConstraintFeatures ||
      variable_features.size() !=
          static_cast<size_t>(num_variables) * kNumVariableFeatures ||
      candidate_mask.size() != static_cast<size_t>(num_variables) ||
      edge_variable.size() != edge_constraint.size() ||
      edge_coefficient.size() != edge_constraint.size()) {
    throw std::invalid_argument("bipartite graph arrays have inconsistent sizes");
  }
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(constraint_features) || !finite(variable_features) ||
      !finite(edge_coefficient)) {
    throw std::invalid_argument("bipartite graph has non-finite features");
  }
  for (int e = 0; e < num_edges(); ++e) {
    if (edge_constraint[e] < 0 || edge_constraint[e] >= num_constraints ||
        edge_variable[e] < 0 || edge_variable[e] >= num_variables) {
      throw std::invalid_argument("bipartite graph edge out of range");
    }
  }
}

void BipartiteGraph::serialize(std::ostream& out) const {
  write_pod(out, static_cast<int32_t>(num_constraints));
  write_pod(out, static_cast<int32_t>(num_variables));
  write_vector(out, constraint_features);
  write_vector(out, variable_features);
  write_vector(out, edge_constraint);
  write_vector(out, edge_variable);
  write_vector(out, edge_coefficient);
  write_vector(out, candidate_mask);
}

BipartiteGraph BipartiteGraph::deserialize(std::istream& in) {
  BipartiteGraph graph;
  graph.num_constraints = read_pod<int32_t>(in);
  graph.num_variables = read_pod<int32_t>(in);
  graph.constraint_features = read_vector<double>(in);
  graph.variable_features = read_vector<double>(in);
  graph.edge_constraint = read_vector<int>(in);
  graph.edge_variable = read_vector<int>(in);
  graph.edge_coefficient = read_vector<double>(in);
  graph.candidate_mask = read_vector<uint8_t>(in);
  graph.validate();
  return graph;
}

std::vector<int> fractional_candidates(const MilpInstance& instance,
                                       std::span<const double> values) {
  std::vector<int> out;
  for (int j : instance.integer_set) {
    if (!is_integral(values[j])) out.push_back(j);
  }
  return out;
}

BipartiteGraph build_bipartite_graph(const MilpInstance& instance,
                                     const LpSolution& lp,
                                     const NodeStats& stats) {
  if (!lp.optimal()) {
    throw std::invalid_argument("bipartite graph needs an optimal LP solution");
  }
  const int m = instance.num_constraints();
  const int n = instance.num_variables();
  const std::vector<bool> integral = instance.integrality_mask();
  std::span<const double> lower =
      stats.lower.empty() ? std::span<const double>(instance.lower_bounds)
                          : stats.lower;
  std::span<const double> upper =
      stats.upper.empty() ? std::span<const double>(instance.upper_bounds)
                          : stats.upper;

  double objective_scale = 0.0;
  for (double c : instance.objective) objective_scale = std::max(objective_scale, std::abs(c));
  if (objective_scale == 0.0) objective_scale = 1.0;

  BipartiteGraph graph;
  graph.num_constraints = m;
  graph.num_variables = n;
  graph.constraint_features.assign(static_cast<size_t>(m) * kNumConstraintFeatures, 0.0);
  graph.variable_features.assign(static_cast<size_t>(n) * kNumVariableFeatures, 0.0);
  graph.candidate_mask.assign(n, 0);

  std::vector<double> row_norm(m, 0.0);
  std::vector<double> col_norm_sq(n, 0.0);
  std::vector<int> col_nnz(n, 0);
  double max_row_norm = 0.0;
  for (int i = 0; i < m; ++i) {
    const SparseRow& row = instance.rows[i];
    double sq = 0.0;
    for (size_t k = 0; k < row.columns.size(); ++k) {
      const double a = row.coefficients[k];
      if (a == 0.0) continue;
      sq += a * a;
      col_norm_sq[row.columns[k]] += a * a;
      ++col_nnz[row.columns[k]];
    }
    row_norm[i] = std::sqrt(sq);
    max_row_norm = std::max(max_row_norm, row_norm[i]);
  }
  double max_col_norm = 0.0;
  for (double sq : col_norm_sq) max_col_norm = std::max(max_col_norm, std::sqrt(sq));
  if (max_col_norm == 0.0) max_col_norm = 1.0;

  for (int i = 0; i < m; ++i) {
    const SparseRow& row = instance.rows[i];
    const double norm = row_norm[i];
    double* f = &graph.constraint_features[static_cast<size_t>(i) * kNumConstraintFeatures];
    f[kConsRhs] = row.rhs / norm;
    f[kConsSlack] = lp.slacks[i] / norm;
    f[kConsDual] = lp.duals[i] * norm / objective_scale;
    f[kConsRowNorm] = norm / max_row_norm;
    f[kConsTight] =
        std::abs(lp.slacks[i]) <= 1e-6 * std::max(1.0, std::abs(row.rhs)) ? 1.0 : 0.0;
    for (size_t k = 0; k < row.columns.size(); ++k) {
      if (row.coefficients[k] == 0.0) continue;
      graph.edge_constraint.push_back(i);
      graph.edge_variable.push_back(row.columns[k]);
      graph.edge_coefficient.push_back(row.coefficients[k] / norm);
    }
  }

  for (int j = 0; j < n; ++j) {
    double* f = &graph.variable_features[static_cast<size_t>(j) * kNumVariableFeatures];
    const double x = lp.values[j];
    const double fractionality = std::abs(x - std::round(x));
    const bool candidate = integral[j] && fractionality > kIntegralityTolerance;
    graph.candidate_mask[j] = candidate ? 1 : 0;
    f[kVarObjective] = instance.objective[j] / objective_scale;
    f[kVarLpValue] = x;
    f[kVarFractionality] = fractionality;
    f[kVarDistLower] = std::isfinite(lower[j]) ? x - lower[j] : 0.0;
    f[kVarDistUpper] = std::isfinite(upper[j]) ? upper[j] - x : 0.0;
    const bool at_bound = (std::isfinite(lower[j]) && std::abs(x - lower[j]) <= 1e-9) ||
                          (std::isfinite(upper[j]) && std::abs(x - upper[j]) <= 1e-9);
    f[kVarAtBound] = at_bound ? 1.0 : 0.0;
    f[kVarReducedCost] = lp.reduced_costs[j] / objective_scale;
    f[kVarBasic] = lp.basis.status.empty() ? 0.0
                   : lp.basis.status[j] == BasisStatus::kBasic ? 1.0 : 0.0;
    switch (variable_kind(instance, j, integral)) {
      case VariableKind::kBinary:
        f[kVarTypeBinary] = 1.0;
        break;
      case VariableKind::kInteger:
        f[kVarTypeInteger] = 1.0;
        break;
      case VariableKind::kContinuous:
        f[kVarTypeContinuous] = 1.0;
        break;
    }
    f[kVarColumnNorm] = std::sqrt(col_norm_sq[j]) / max_col_norm;
    f[kVarColumnNnz] = m > 0 ? static_cast<double>(col_nnz[j]) / m : 0.0;
    if (candidate && stats.pseudocosts != nullptr) {
      const double up_fraction = std::ceil(x) - x;
      const double down_fraction = x - std::floor(x);
      f[kVarPseudocostUp] =
          stats.pseudocosts->estimate(j, BranchDirection::kUp, 1.0) * up_fraction /
          objective_scale;
      f[kVarPseudocostDown] =
          stats.pseudocosts->estimate(j, BranchDirection::kDown, 1.0) *
          down_fraction / objective_scale;
    }
    if (!stats.branch_counts.empty()) {
      f[kVarTimesBranched] = static_cast<double>(stats.branch_counts[j]) /
                             (1.0 + stats.total_decisions);
    }
    f[kVarRootLpValue] = stats.root_values.empty() ? x : stats.root_values[j];
    f[kVarDepthFractionality] = fractionality / (1.0 + stats.depth);
    f[kVarCandidate] = candidate ? 1.0 : 0.0;
  }
  graph.validate();
  return graph;
}

}  // namespace revibranch
