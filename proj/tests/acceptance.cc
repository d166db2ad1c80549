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

// Acceptance checks 1-10. Prints one PASS/FAIL line per check and exits
// nonzero if any fails. Arguments select a subset: `acceptance 2 5 6`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "network_fixtures.h"
#include "oracles.h"
#include "revibranch/bench.h"
#include "revibranch/dqn.h"
#include "revibranch/metrics.h"
#include "revibranch/policies.h"
#include "revibranch/replay.h"
#include "revibranch/rewards.h"

namespace fs = std::filesystem;

namespace revibranch {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << x;
  return out.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "revibranch_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool bitwise_rows(const Matrix& a, Eigen::Index row_a, const Matrix& b, Eigen::Index row_b) {
  if (a.cols() != b.cols()) return false;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const double x = a(row_a, k), y = b(row_b, k);
    if (std::memcmp(&x, &y, sizeof(double)) != 0) return false;
  }
  return true;
}

// 1. Every policy reaches the enumerated optimum on small instances.
Outcome optimality_oracle() {
  const auto start = std::chrono::steady_clock::now();
  NetworkConfig net_config;
  net_config.d = 8;
  net_config.decoder_blocks = 1;
  net_config.max_actions = 64;
  net_config.seed = 5;
  const ReviBranchNet untrained(net_config);
  const std::vector<std::string> names = {"random", "mostfrac", "pb", "pb-warm", "sb"};

  int instances = 0, solves = 0, mismatches = 0, max_binaries = 0;
  std::set<std::string> families;
  std::string first_problem;
  for (uint64_t seed = 0; seed < 70; ++seed) {
    Rng rng(mix_seed(seed, 0x4f524143));
    const std::vector<MilpInstance> batch = {
        generate_set_covering(static_cast<int>(rng.uniform_int(4, 8)),
                              static_cast<int>(rng.uniform_int(6, 12)), 0.35, seed),
        generate_combinatorial_auction(static_cast<int>(rng.uniform_int(3, 6)),
                                       static_cast<int>(rng.uniform_int(6, 12)), seed),
        generate_facility_location(static_cast<int>(rng.uniform_int(2, 4)),
                                   static_cast<int>(rng.uniform_int(2, 5)), seed),
    };
    for (size_t f = 0; f < batch.size(); ++f) {
      const MilpInstance& instance = batch[f];
      families.insert(std::to_string(f));
      max_binaries = std::max(max_binaries, static_cast<int>(instance.integer_set.size()));
      ++instances;
      const std::optional<double> expected = testing::brute_force_optimum(instance);
      std::vector<std::unique_ptr<BranchingPolicy>> policies;
      for (const std::string& name : names) policies.push_back(make_classic_policy(name));
      policies.push_back(std::make_unique<LearnedPolicy>(untrained, LearnedPolicyOptions{}));
      for (auto& policy : policies) {
        BnbConfig config;
        config.seed = seed;
        const SolveReport report = solve(instance, *policy, config);
        ++solves;
        bool ok;
        if (!expected) {
          ok = report.status == SolveStatus::kInfeasible;
        } else {
          const bool integral = std::abs(*expected - std::round(*expected)) < 1e-9;
          ok = report.status == SolveStatus::kOptimal &&
               (integral ? std::llround(report.objective) == std::llround(*expected) &&
                               std::abs(report.objective - *expected) < 1e-6
                         : std::abs(report.objective - *expected) < 1e-6);
        }
        if (!ok) {
          ++mismatches;
          if (first_problem.empty()) {
            first_problem = "; first mismatch " + instance.name + " " + policy->name();
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = mismatches == 0 && instances >= 200 && max_binaries <= 12 &&
             families.size() == 3 && elapsed < 300.0;
  out.detail = std::to_string(instances) + " instances, " + std::to_string(solves) +
               " solves, " + std::to_string(mismatches) + " mismatches, max binaries " +
               std::to_string(max_binaries) + ", " + fmt(elapsed, 3) + " s" + first_problem;
  return out;
}

// 2. IWRR endpoints, monotonicity and hand-derived values.
Outcome iwrr_exactness() {
  int failures = 0;
  for (int L = 2; L <= 200; ++L) {
    const std::vector<double> f = iwrr(std::vector<double>(L, -1.0)).final_rewards;
    if (std::abs(f.front() + 0.1) > 1e-12 || std::abs(f.back() + 0.9) > 1e-12) ++failures;
    for (int i = 1; i < L; ++i) {
      if (!(f[i] < f[i - 1])) ++failures;
    }
  }
  const double l4 = iwrr(std::vector<double>(4, -1.0)).final_rewards[1];
  const double l1 = iwrr(std::vector<double>{-1.0}).final_rewards[0];
  Outcome out;
  out.pass = failures == 0 && std::abs(l4 + 0.36667) <= 1e-4 && l1 == -0.5;
  out.detail = "L=2..200 violations " + std::to_string(failures) + ", L=4 i=1 -> " +
               fmt(l4, 8) + ", L=1 -> " + fmt(l1);
  return out;
}

// Collects a long episode on an auction instance with deep trees.
CollectedEpisode long_episode(const ReviBranchNet& net, int64_t node_limit) {
  LearnedPolicyOptions options;
  options.trajectory_length = 5;
  options.epsilon = 1.0;
  const InstanceSpec spec = tier_spec(Family::kCombinatorialAuction, Tier::kHard, true, 2.0);
  return collect_episode(generate_instance(spec, kTestSeedBase + 7), net, options, 7,
                         node_limit);
}

// 3. Buffer bytes grow linearly with episode length.
Outcome storage_linearity() {
  NetworkConfig config = testing::tiny_config(3);
  config.max_actions = 256;
  const ReviBranchNet net(config);
  const CollectedEpisode episode = long_episode(net, 260);
  const int available = static_cast<int>(episode.actions.size());
  Outcome out;
  if (available < 100) {
    out.detail = "episode too short (" + std::to_string(available) + " decisions)";
    return out;
  }
  auto stored_bytes = [&](int length, int64_t* snapshots) {
    ReplayBuffer buffer(100000);
    std::vector<BipartiteGraph> graphs(episode.graphs.begin(), episode.graphs.begin() + length);
    const std::vector<double> rewards = iwrr(std::vector<double>(length, -1.0)).final_rewards;
    buffer.store_episode(std::move(graphs),
                         std::span<const int>(episode.actions.data(), length), rewards);
    *snapshots = buffer.num_snapshots();
    std::stringstream bytes;
    buffer.save(bytes);
    return static_cast<double>(bytes.str().size());
  };
  int64_t snap50 = 0, snap100 = 0;
  const double b50 = stored_bytes(50, &snap50);
  const double b100 = stored_bytes(100, &snap100);
  const double ratio = b100 / b50;
  bool counts_ok = snap50 == 50 && snap100 == 100;
  for (int length : {1, 7, 33}) {
    int64_t snaps = 0;
    stored_bytes(length, &snaps);
    counts_ok = counts_ok && snaps == length;
  }
  out.pass = ratio >= 1.8 && ratio <= 2.2 && counts_ok;
  out.detail = "bytes " + fmt(b50, 8) + " -> " + fmt(b100, 8) + ", ratio " + fmt(ratio) +
               ", snapshots 50/100 -> " + std::to_string(snap50) + "/" +
               std::to_string(snap100);
  return out;
}

// 4. Revived windows equal the representations computed during collection.
Outcome revival_fidelity() {
  Rng rng(0x52455649);
  int episodes = 0, compared_rows = 0, mismatches = 0, attempts = 0;
  while (episodes < 100 && attempts < 2000) {
    ++attempts;
    NetworkConfig config = testing::tiny_config(rng.next_u64(), rng.bernoulli(0.5) ? 1 : 2);
    config.d = rng.bernoulli(0.5) ? 4 : 8;
    config.max_actions = 128;
    const ReviBranchNet net(config);
    InstanceSpec spec;
    switch (rng.uniform_int(0, 2)) {
      case 0:
        spec = {Family::kSetCovering, 30, 60, 0.15};
        break;
      case 1:
        spec = {Family::kCombinatorialAuction, 12, 40, 0.0};
        break;
      default:
        spec = {Family::kFacilityLocation, 5, 8, 0.0};
        break;
    }
    LearnedPolicyOptions options;
    options.trajectory_length = static_cast<int>(rng.uniform_int(1, 12));
    options.epsilon = rng.uniform(0.0, 1.0);
    options.record_steps = true;
    const uint64_t seed = rng.next_u64() % kSeedRangeWidth;
    const CollectedEpisode ep =
        collect_episode(generate_instance(spec, seed), net, options, seed, 80);
    if (ep.actions.empty()) continue;
    ReplayBuffer original(100000);
    const int64_t id = original.store_episode(ep.graphs, ep.actions, ep.shaped.final_rewards);
    // Revive from a serialized copy, as a resumed trainer would.
    std::stringstream bytes;
    original.save(bytes);
    const ReplayBuffer buffer = ReplayBuffer::load(bytes);
    const int L = static_cast<int>(ep.actions.size());
    for (int end = 0; end < L; ++end) {
      const int T = static_cast<int>(rng.uniform_int(1, L));
      const RevivedTrajectory r = revive_trajectory(buffer, id, end, T, net);
      const int first = window_start(end, T);
      for (int i = first; i <= end; ++i) {
        ++compared_rows;
        if (!bitwise_rows(r.r_traj.value(), i - first, ep.eager_steps[i], 0)) ++mismatches;
      }
    }
    ++episodes;
  }
  Outcome out;
  out.pass = episodes == 100 && mismatches == 0 && compared_rows > 0;
  out.detail = std::to_string(episodes) + " episodes, " + std::to_string(compared_rows) +
               " revived rows, " + std::to_string(mismatches) + " differ";
  return out;
}

// 5. Finite-difference gradient checks per block.
Outcome gradient_correctness() {
  double worst = 0.0;
  std::string worst_block = "none";
  int checks = 0, nonfinite = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    for (const auto& [block, error] : testing::block_gradient_errors(seed)) {
      ++checks;
      if (!std::isfinite(error)) {
        ++nonfinite;
      } else if (error > worst) {
        worst = error;
        worst_block = block + " seed " + std::to_string(seed);
      }
    }
  }
  Outcome out;
  out.pass = worst <= 1e-4 && nonfinite == 0 && checks >= 20 * 6;
  out.detail = std::to_string(checks) + " block checks at d=4 over 20 seeds, worst relative "
               "error " + fmt(worst, 3) + " (" + worst_block + ")";
  return out;
}

double max_row_sum_error(const Tensor& weights) {
  const Matrix& w = weights.value();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) worst = std::max(worst, std::abs(w.row(i).sum() - 1.0));
  return worst;
}

// 6. Attention normalization, alpha = 0, candidate masks, causality.
Outcome architectural_invariants() {
  Rng rng(0x494e5641);
  double row_error = 0.0;
  int attention_matrices = 0;
  bool alpha_zero_exact = true;
  for (int trial = 0; trial < 50; ++trial) {
    NetworkConfig config = testing::tiny_config(trial, 2);
    config.d = 8;
    config.heads = trial % 2 ? 2 : 1;
    ReviBranchNet net(config);
    const BipartiteGraph g = testing::random_graph(static_cast<int>(rng.uniform_int(1, 6)),
                                                   static_cast<int>(rng.uniform_int(1, 8)), rng);
    const Tensor v = net.gcn_encode(g);
    StepTrace step;
    net.step_builder(v, net.encode_actions(std::vector<int>{0}), &step);
    const int L = static_cast<int>(rng.uniform_int(1, 6));
    const Tensor traj = Tensor::constant(testing::random_matrix(L, config.d, rng));
    DecodeTrace decode;
    const DecodeResult res = net.decode(traj, v, &decode);
    FusionTrace fusion;
    net.fuse(res.r_unified, traj, v, &fusion);
    std::vector<Tensor> all = {step.weights, decode.aggregation_weights};
    all.insert(all.end(), decode.self_weights.begin(), decode.self_weights.end());
    all.insert(all.end(), decode.cross_weights.begin(), decode.cross_weights.end());
    all.insert(all.end(), fusion.weights.begin(), fusion.weights.end());
    for (const Tensor& w : all) {
      row_error = std::max(row_error, max_row_sum_error(w));
      ++attention_matrices;
    }
    net.params().get("alpha").mutable_value()(0, 0) = 0.0;
    const Tensor fused = net.fuse(res.r_unified, traj, v);
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      alpha_zero_exact = alpha_zero_exact && bitwise_rows(fused.value(), i, v.value(), i);
    }
  }

  // Greedy choices on fuzzed states, through the full network.
  int fuzzed = 0, outside = 0;
  {
    NetworkConfig config = testing::tiny_config(77, 1);
    config.max_actions = 16;
    ReviBranchNet net(config);
    NoGradGuard no_grad;
    for (; fuzzed < 10000; ++fuzzed) {
      BipartiteGraph g = testing::random_graph(static_cast<int>(rng.uniform_int(1, 5)),
                                               static_cast<int>(rng.uniform_int(1, 10)), rng,
                                               rng.uniform(0.0, 1.0));
      std::vector<int> history;
      const int steps = static_cast<int>(rng.uniform_int(0, 3));
      for (int s = 0; s < steps; ++s) history.push_back(static_cast<int>(rng.uniform_int(0, 15)));
      const Tensor traj = net.encode_actions(history);
      const Tensor q = net.q_values(g, traj, rng.bernoulli(0.8));
      const int a = greedy_action(q, g.candidate_mask);
      if (a < 0 || a >= g.num_variables || !g.candidate_mask[a]) ++outside;
    }
  }

  // Perturbing step j leaves decoder outputs before j untouched.
  int causal_checks = 0, causal_violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    ReviBranchNet net(testing::tiny_config(500 + trial, 2));
    const int L = static_cast<int>(rng.uniform_int(2, 8));
    const Matrix traj = testing::random_matrix(L, 4, rng);
    const Tensor v = Tensor::constant(testing::random_matrix(3, 4, rng));
    const Matrix before = net.decode(Tensor::constant(traj), v).output.value();
    for (int j = 0; j < L; ++j) {
      Matrix perturbed = traj;
      perturbed.row(j) += testing::random_matrix(1, 4, rng);
      const Matrix after = net.decode(Tensor::constant(perturbed), v).output.value();
      for (int i = 0; i < L; ++i) {
        ++causal_checks;
        const bool same = bitwise_rows(before, i, after, i);
        if (i < j && !same) ++causal_violations;
        if (i >= j && same) ++causal_violations;
      }
    }
  }

  Outcome out;
  out.pass = row_error <= 1e-8 && alpha_zero_exact && outside == 0 && causal_violations == 0;
  out.detail = std::to_string(attention_matrices) + " attention matrices, max |row sum - 1| " +
               fmt(row_error, 3) + "; alpha=0 exact: " + (alpha_zero_exact ? "yes" : "no") +
               "; " + std::to_string(outside) + "/" + std::to_string(fuzzed) +
               " greedy picks outside mask; causal " + std::to_string(causal_violations) + "/" +
               std::to_string(causal_checks) + " violations";
  return out;
}

// 7. Baseline ordering on desk-scale set covering.
Outcome baseline_ordering() {
  const auto start = std::chrono::steady_clock::now();
  const BenchmarkSuite suite = make_suite(Family::kSetCovering, Tier::kMedium, 50, 0);
  std::vector<PolicySpec> policies;
  for (const char* name : {"random", "mostfrac", "sb", "pb", "pb-warm"}) {
    policies.push_back(classic_policy(name));
  }
  const std::vector<RunRecord> records = run_benchmark(suite, policies);
  write_benchmark(work_dir("baselines"), records);
  std::map<std::string, double> geo;
  for (const PolicySummary& s : summarize(records)) geo[s.policy] = s.geomean_nodes;
  const std::vector<double> warm = instance_means(records, "pb-warm");
  const std::vector<double> cold = instance_means(records, "pb");
  const double p = wilcoxon_signed_rank_p(warm, cold);
  const double vs_mostfrac = 1.0 - geo["sb"] / geo["mostfrac"];
  const double vs_random = 1.0 - geo["sb"] / geo["random"];
  Outcome out;
  out.pass = vs_mostfrac >= 0.2 && vs_random >= 0.2 && geo["pb-warm"] < geo["pb"] && p < 0.05;
  out.detail = describe(suite.spec) + ", 50 instances x 5 seeds: geomean nodes sb " +
               fmt(geo["sb"]) + ", mostfrac " + fmt(geo["mostfrac"]) + ", random " +
               fmt(geo["random"]) + " (sb lower by " + fmt(100 * vs_mostfrac, 3) + "% / " +
               fmt(100 * vs_random, 3) + "%); pb-warm " + fmt(geo["pb-warm"]) + " vs pb " +
               fmt(geo["pb"]) + ", Wilcoxon p " + fmt(p, 3) + "; " +
               fmt(seconds_since(start), 3) + " s";
  return out;
}

// Shared by 8 and 9: the smoke-scale training configuration.
TrainConfig smoke_config() {
  TrainConfig c;
  c.instances = tier_spec(Family::kSetCovering, Tier::kTiny);
  c.network.d = 32;
  c.network.decoder_blocks = 1;
  c.network.heads = 1;
  c.network.max_actions = c.instances.size2;
  c.gamma = 0.9;
  c.epsilon_start = 1.0;
  c.epsilon_end = 0.05;
  c.epsilon_decay_decisions = 1000;
  c.target_sync_steps = 50;
  c.batch_size = 32;
  c.learning_rate = 1e-4;
  c.trajectory_length = 25;
  c.buffer_capacity = 20000;
  c.learning_starts = 500;
  c.max_epochs = 4000;
  c.train_steps_per_epoch = 2;
  c.eval_every = 200;
  c.validation_size = 20;
  c.episode_node_limit = 500;
  c.eval_node_limit = 5000;
  c.seed = 0;
  return c;
}

BenchmarkSuite smoke_suite() {
  BenchmarkSuite suite = make_suite(Family::kSetCovering, Tier::kTiny, 20, 0);
  return suite;
}

struct SmokeRun {
  bool done = false;
  std::vector<AblationRun> runs;
  std::vector<RunRecord> records;  // learned variants, then random
  double train_seconds = 0.0;
  fs::path dir;
  std::string error;
};

SmokeRun& smoke_run() {
  static SmokeRun run;
  if (run.done) return run;
  run.done = true;
  try {
    run.dir = work_dir("smoke");
    std::vector<AblationFlags> variants(4);
    variants[1].no_revival = true;
    variants[2].no_dense_rewards = true;
    variants[3].no_decoder = true;
    const auto start = std::chrono::steady_clock::now();
    run.runs = run_ablations(smoke_config(), variants, smoke_suite(), run.dir);
    run.train_seconds = seconds_since(start);
    run.records = read_results(run.dir / "results.csv");
    const PolicySpec random = classic_policy("random");
    const std::vector<RunRecord> baseline =
        run_benchmark(smoke_suite(), std::span<const PolicySpec>(&random, 1));
    run.records.insert(run.records.end(), baseline.begin(), baseline.end());
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  return run;
}

std::map<std::string, double> smoke_geomeans(const SmokeRun& run) {
  std::map<std::string, double> geo;
  for (const PolicySummary& s : summarize(run.records)) geo[s.policy] = s.geomean_nodes;
  return geo;
}

// Mean of the first and last tenth of the logged losses.
std::pair<double, double> loss_ends(const fs::path& log_path) {
  std::ifstream in(log_path);
  std::string line;
  std::getline(in, line);
  std::vector<double> losses;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) f.push_back(field);
    if (f.size() >= 2 && !f[1].empty()) losses.push_back(std::stod(f[1]));
  }
  if (losses.size() < 10) return {NAN, NAN};
  const size_t k = losses.size() / 10;
  const std::vector<double> head(losses.begin(), losses.begin() + k);
  const std::vector<double> tail(losses.end() - k, losses.end());
  return {arithmetic_mean(head), arithmetic_mean(tail)};
}

// 8. Training smoke on tiny set covering.
Outcome training_smoke() {
  const SmokeRun& run = smoke_run();
  Outcome out;
  if (!run.error.empty()) {
    out.detail = "error: " + run.error;
    return out;
  }
  std::map<std::string, double> geo = smoke_geomeans(run);
  const auto [first, last] = loss_ends(run.dir / "full" / "train_log.csv");
  out.pass = geo.count("full") && geo.count("random") && geo["full"] <= geo["random"] &&
             last < first && run.train_seconds <= 7200.0;
  out.detail = "20 held-out tiny instances x 5 seeds: learned " + fmt(geo["full"]) +
               " vs random " + fmt(geo["random"]) + " geomean nodes; loss first/last tenth " +
               fmt(first) + " -> " + fmt(last) + "; 4 trainings + evaluation " +
               fmt(run.train_seconds, 4) + " s";
  return out;
}

// 9. Ablation variants run end to end; no_revival does not beat full.
Outcome ablation_harness() {
  const SmokeRun& run = smoke_run();
  Outcome out;
  if (!run.error.empty()) {
    out.detail = "error: " + run.error;
    return out;
  }
  std::map<std::string, double> geo = smoke_geomeans(run);
  bool all_ran = run.runs.size() == 4;
  for (const AblationRun& r : run.runs) {
    all_ran = all_ran && fs::exists(r.policy_path) && geo.count(r.variant) &&
              std::isfinite(geo[r.variant]);
  }
  const fs::path bars_dir = run.dir / "plots";
  const auto files = emit_plot_data(run.dir / "results.csv", bars_dir);
  out.pass = all_ran && geo["no_revival"] >= geo["full"];
  out.detail = "geomean nodes full " + fmt(geo["full"]) + ", no_revival " +
               fmt(geo["no_revival"]) + ", no_dense_rewards " + fmt(geo["no_dense_rewards"]) +
               ", no_decoder " + fmt(geo["no_decoder"]) + "; bars at " + files.at(0).string();
  return out;
}

// Runs the CLI with output captured to `log`; returns the exit status.
int run_cli(const std::string& args, const fs::path& log) {
  const std::string command =
      std::string("\"") + REVIBRANCH_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  return std::system(command.c_str());
}

// Drops the final column (wall time) of every CSV line.
std::string without_last_column(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

// 10. Repeated CLI invocations give identical metrics.
Outcome determinism() {
  const fs::path dir = work_dir("determinism");
  std::vector<std::string> problems;
  auto expect_same = [&](const std::string& what, const std::string& a, const std::string& b) {
    if (a.empty() || a != b) problems.push_back(what);
  };
  // train
  const std::string train_args =
      "train --tier tiny --seed 11 --max_epochs 60 --eval_every 20 --validation_size 4 "
      "--network.d 8 --network.decoder_blocks 1 --batch_size 8 --target_sync_steps 10 "
      "--epsilon_decay_decisions 100 --learning_rate 1e-3 --quiet --out ";
  for (const char* run : {"train_a", "train_b"}) {
    if (run_cli(train_args + "\"" + (dir / run).string() + "\"", dir / (std::string(run) + ".log")) != 0) {
      problems.push_back(std::string(run) + " exit");
    }
  }
  for (const char* file : {"train_log.csv", "best.policy", "last.policy", "config.txt"}) {
    expect_same(std::string("train ") + file, slurp(dir / "train_a" / file),
                slurp(dir / "train_b" / file));
  }
  // solve, with classic and learned policies
  const std::string policy = (dir / "train_a" / "best.policy").string();
  const std::vector<std::string> solves = {
      "solve --family setcover --tier medium --index 3 --policy random --solve-seed 5",
      "solve --family facility --tier medium --index 1 --policy sb",
      "solve --family cauction --tier hard --index 2 --policy revibranch --checkpoint \"" +
          policy + "\""};
  for (size_t k = 0; k < solves.size(); ++k) {
    std::string outputs[2], traces[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path trace = dir / ("trace_" + std::to_string(k) + "_" + std::to_string(rep));
      const fs::path log = dir / ("solve_" + std::to_string(k) + "_" + std::to_string(rep));
      if (run_cli(solves[k] + " --out \"" + trace.string() + "\"", log) != 0) {
        problems.push_back("solve exit " + std::to_string(k));
      }
      outputs[rep] = without_last_column(slurp(log));
      traces[rep] = slurp(trace);
    }
    expect_same("solve metrics " + std::to_string(k), outputs[0], outputs[1]);
    expect_same("solve trace " + std::to_string(k), traces[0], traces[1]);
  }
  // bench, single- and multi-threaded
  const std::string bench_args =
      "bench --family setcover --tier easy --n 8 --seeds 3 --policy random --policy pb-warm "
      "--policy mostfrac --checkpoint \"" + policy + "\" ";
  int threads = 1;
  for (const char* run : {"bench_a", "bench_b"}) {
    if (run_cli(bench_args + "--threads " + std::to_string(threads) + " --out \"" +
                    (dir / run).string() + "\"",
                dir / (std::string(run) + ".log")) != 0) {
      problems.push_back(std::string(run) + " exit");
    }
    threads = 3;
  }
  expect_same("bench results", without_last_column(slurp(dir / "bench_a" / "results.csv")),
              without_last_column(slurp(dir / "bench_b" / "results.csv")));
  expect_same("bench summary", slurp(dir / "bench_a" / "summary.csv"),
              slurp(dir / "bench_b" / "summary.csv"));

  Outcome out;
  out.pass = problems.empty();
  if (problems.empty()) {
    out.detail = "train (log + checkpoints), 3 solves (metrics + traces), bench (1 vs 3 "
                 "threads) identical across repeats";
  } else {
    out.detail = "differences:";
    for (const std::string& p : problems) out.detail += " [" + p + "]";
  }
  return out;
}

}  // namespace
}  // namespace revibranch

int main(int argc, char** argv) {
  using revibranch::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"optimality oracle", revibranch::optimality_oracle},
      {"IWRR exactness", revibranch::iwrr_exactness},
      {"storage linearity", revibranch::storage_linearity},
      {"revival fidelity", revibranch::revival_fidelity},
      {"gradient correctness", revibranch::gradient_correctness},
      {"architectural invariants", revibranch::architectural_invariants},
      {"baseline ordering", revibranch::baseline_ordering},
      {"training smoke", revibranch::training_smoke},
      {"ablation harness", revibranch::ablation_harness},
      {"determinism", revibranch::determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    const int number = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    Outcome outcome;
    try {
      outcome = criteria[k].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    failed += outcome.pass ? 0 : 1;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << number << " ("
              << criteria[k].first << "): " << outcome.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
