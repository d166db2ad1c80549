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

// Benchmark harness: instance suites, policy runs fanned out over threads,
// geometric-mean aggregation, the trajectory-length sweep and plot tables.
//
// results.csv
//   family,tier,instance,instance_seed,policy,seed,status,nodes,
//   lp_iterations,objective,wall_time
// summary.csv (after one '#' metadata line)
//   policy,instances,runs,geomean_nodes,nodes_std_pct,geomean_lp_iterations,
//   lp_std_pct,limit_hits
// sweep.csv
//   T,instances,runs,geomean_nodes,nodes_std_pct,decisions,mean_inference_ms

#ifndef REVIBRANCH_BENCH_H_
#define REVIBRANCH_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "revibranch/bnb.h"
#include "revibranch/dqn.h"
#include "revibranch/generators.h"
#include "revibranch/learned_policy.h"

namespace revibranch {

class MissingCheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CsvParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// kTiny is the training smoke size; easy/medium/hard follow the full-scale
// presets, shrunk to desk size unless full scale is requested.
enum class Tier { kTiny, kEasy, kMedium, kHard };

std::string tier_name(Tier tier);
Tier parse_tier(const std::string& name);

// Instance dimensions for a family and tier. `factor` multiplies both sizes
// (rounded, at least 1); tiny ignores full_scale.
InstanceSpec tier_spec(Family family, Tier tier, bool full_scale = false,
                       double factor = 1.0);

struct BenchmarkSuite {
  InstanceSpec spec;
  std::string tier = "medium";  // label only
  int instance_count = 50;
  std::vector<uint64_t> seeds = {0, 1, 2, 3, 4};
  uint64_t suite_seed = 0;
  int64_t node_limit = 100000;
  double time_limit_seconds = 600.0;

  // In the test range, disjoint from training and validation seeds.
  uint64_t instance_seed(int index) const;
  // Seed for one (instance, evaluation seed) solve.
  uint64_t solve_seed(int index, uint64_t seed) const;
  std::vector<MilpInstance> instances() const;
};

BenchmarkSuite make_suite(Family family, Tier tier, int instance_count,
                          uint64_t suite_seed = 0, bool full_scale = false,
                          double factor = 1.0);

// A named policy: a classic rule or a loaded learned bundle.
struct PolicySpec {
  std::string label;
  std::string classic;  // empty for learned
  std::optional<PolicyBundle> bundle;

  std::unique_ptr<BranchingPolicy> make() const;
};

PolicySpec classic_policy(const std::string& name);
PolicySpec learned_policy(const std::string& label, PolicyBundle bundle);
// Throws MissingCheckpointError naming the path.
PolicySpec learned_policy(const std::string& label, const std::filesystem::path& path);
// "random", "mostfrac", "pb", "pb-warm", "sb", or "label=path/to.policy".
PolicySpec parse_policy(const std::string& text);

struct RunRecord {
  std::string family;
  std::string tier;
  std::string instance;
  uint64_t instance_seed = 0;
  std::string policy;
  uint64_t seed = 0;
  SolveStatus status = SolveStatus::kNumericalError;
  int64_t nodes = 0;
  int64_t lp_iterations = 0;
  double objective = 0.0;
  double wall_time = 0.0;
  // Learned policies only; not written to results.csv.
  double inference_seconds = 0.0;
  int64_t greedy_decisions = 0;
};

std::string results_header();
std::string format_record(const RunRecord& record, bool include_wall_time = true);
std::vector<RunRecord> read_results(const std::filesystem::path& path);
std::vector<RunRecord> parse_results(const std::string& text);

struct PolicySummary {
  std::string policy;
  int instances = 0;
  int runs = 0;
  double geomean_nodes = 0.0;
  double nodes_std_pct = 0.0;
  double geomean_lp_iterations = 0.0;
  double lp_std_pct = 0.0;
  int limit_hits = 0;
};

// One summary per policy in first-appearance order. Each instance is
// reduced to its mean over seeds; the geometric mean runs over those means
// and std_pct averages the per-instance std/mean percentages.
std::vector<PolicySummary> summarize(std::span<const RunRecord> records);
std::string summary_metadata();
std::string summary_header();
std::string format_summary(const PolicySummary& summary);

// Per-instance seed means for one policy, ordered by instance seed.
std::vector<double> instance_means(std::span<const RunRecord> records,
                                   const std::string& policy, bool lp_iterations = false);

struct BenchmarkOptions {
  int threads = 0;  // 0: hardware concurrency
};

// Solves every (policy, instance, seed) combination. Records come back in
// policy, instance, seed order whatever the thread interleaving.
std::vector<RunRecord> run_benchmark(const BenchmarkSuite& suite,
                                     std::span<const PolicySpec> policies,
                                     const BenchmarkOptions& options = {});

// Writes results.csv and summary.csv into `dir`.
void write_benchmark(const std::filesystem::path& dir, std::span<const RunRecord> records);

struct SweepRow {
  int trajectory_length = 0;
  int instances = 0;
  int runs = 0;
  double geomean_nodes = 0.0;
  double nodes_std_pct = 0.0;
  int64_t decisions = 0;
  double mean_inference_ms = 0.0;  // per greedy decision
};

std::string sweep_header();
std::string format_sweep_row(const SweepRow& row);

// Evaluates one bundle with each trajectory length override.
std::vector<SweepRow> trajectory_length_sweep(std::span<const int> lengths,
                                              const BenchmarkSuite& suite,
                                              const PolicyBundle& bundle,
                                              const BenchmarkOptions& options = {});
void write_sweep(const std::filesystem::path& path, std::span<const SweepRow> rows);

// Plot tables: tab-separated, one header line. From a results CSV:
//   bars.tsv  label geomean_nodes nodes_std_pct geomean_lp_iterations lp_std_pct
// From a sweep CSV:
//   sweep_curve.tsv  T geomean_nodes mean_inference_ms
// Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& csv,
                                                  const std::filesystem::path& out_dir);

struct AblationRun {
  std::string variant;
  std::filesystem::path policy_path;
  std::optional<double> best_eval_nodes;
};

// Trains the full model and each flagged variant from `base` into
// out_dir/<variant>/, then benchmarks the best policies on `suite` and
// writes out_dir/results.csv and summary.csv.
std::vector<AblationRun> run_ablations(const TrainConfig& base,
                                       std::span<const AblationFlags> variants,
                                       const BenchmarkSuite& suite,
                                       const std::filesystem::path& out_dir,
                                       const BenchmarkOptions& options = {});

}  // namespace revibranch

#endif  // REVIBRANCH_BENCH_H_
