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

// revibranch: gen | solve | train | bench | sweep | ablate | plotdata.
// Failures print one JSON object on stderr and exit nonzero.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "revibranch/bench.h"
#include "revibranch/dqn.h"
#include "revibranch/generators.h"
#include "revibranch/instance_io.h"
#include "revibranch/learned_policy.h"
#include "revibranch/policies.h"

namespace rb = revibranch;
namespace fs = std::filesystem;

namespace {

struct SuiteFlags {
  std::string family = "setcover";
  std::string tier = "medium";
  int n = 50;
  uint64_t seed = 0;
  double scale = 1.0;
  bool full_scale = false;
  int seeds = 5;
  int64_t node_limit = 100000;
  double time_limit = 600.0;
  int threads = 0;

  void add(CLI::App* app, bool evaluation_seeds) {
    app->add_option("--family", family, "setcover, cauction or facility")->capture_default_str();
    app->add_option("--tier", tier, "tiny, easy, medium or hard")->capture_default_str();
    app->add_option("--n", n, "number of instances")->capture_default_str();
    app->add_option("--seed", seed, "suite seed")->capture_default_str();
    app->add_option("--scale", scale, "size multiplier for the tier preset")
        ->capture_default_str();
    app->add_flag("--full-scale", full_scale, "use the full-scale tier dimensions");
    if (evaluation_seeds) {
      app->add_option("--seeds", seeds, "evaluation seeds per instance")->capture_default_str();
      app->add_option("--node-limit", node_limit)->capture_default_str();
      app->add_option("--time-limit", time_limit, "seconds per solve")->capture_default_str();
      app->add_option("--threads", threads, "0 uses every core")->capture_default_str();
    }
  }

  rb::BenchmarkSuite suite() const {
    rb::BenchmarkSuite s = rb::make_suite(rb::parse_family(family), rb::parse_tier(tier), n,
                                          seed, full_scale, scale);
    if (seeds < 1) throw std::invalid_argument("--seeds must be >= 1");
    s.seeds.clear();
    for (int k = 0; k < seeds; ++k) s.seeds.push_back(static_cast<uint64_t>(k));
    s.node_limit = node_limit;
    s.time_limit_seconds = time_limit;
    return s;
  }
};

// Training options: a config file, then tier flags, then per-key flags and
// --set overrides, in that order.
struct TrainFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> keyed;
  std::optional<std::string> family, tier;
  std::optional<double> scale;
  std::optional<uint64_t> seed;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "key = value config file");
    app->add_option("--set", sets, "key=value override (repeatable)");
    app->add_option("--family", family, "training family");
    app->add_option("--tier", tier, "training tier preset");
    app->add_option("--scale", scale, "size multiplier for the tier preset");
    app->add_option("--seed", seed, "training seed");
    for (const std::string& key : rb::train_option_keys()) {
      if (key == "seed") continue;
      app->add_option_function<std::string>(
          "--" + key, [this, key](const std::string& v) { keyed[key] = v; },
          "config key " + key);
    }
  }

  rb::TrainConfig config() const {
    rb::TrainConfig c;
    if (!config_path.empty()) c = rb::read_train_config(config_path);
    if (family || tier || scale) {
      const rb::Family f = family ? rb::parse_family(*family) : c.instances.family;
      const rb::Tier t = rb::parse_tier(tier.value_or("tiny"));
      c.instances = rb::tier_spec(f, t, false, scale.value_or(1.0));
    }
    if (seed) c.seed = *seed;
    for (const auto& [key, value] : keyed) rb::set_train_option(c, key, value);
    for (const std::string& kv : sets) {
      const size_t eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value");
      rb::set_train_option(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    c.validate();
    return c;
  }
};

std::vector<rb::PolicySpec> policy_list(const std::vector<std::string>& names,
                                        const std::vector<std::string>& checkpoints) {
  std::vector<rb::PolicySpec> out;
  for (const std::string& name : names) {
    if (name == "revibranch") {
      if (checkpoints.empty()) {
        throw rb::MissingCheckpointError("policy 'revibranch' needs --checkpoint");
      }
      continue;
    }
    out.push_back(rb::parse_policy(name));
  }
  for (size_t k = 0; k < checkpoints.size(); ++k) {
    const std::string label = checkpoints.size() == 1 ? "revibranch"
                                                      : "revibranch" + std::to_string(k);
    out.push_back(rb::learned_policy(label, fs::path(checkpoints[k])));
  }
  return out;
}

int cmd_gen(const SuiteFlags& flags, const std::string& out) {
  const rb::BenchmarkSuite suite = flags.suite();
  fs::create_directories(out);
  std::ofstream manifest(fs::path(out) / "manifest.csv");
  manifest << "index,instance_seed,file\n";
  for (int k = 0; k < suite.instance_count; ++k) {
    const uint64_t seed = suite.instance_seed(k);
    const rb::MilpInstance instance = rb::generate_instance(suite.spec, seed);
    const std::string file = "instance_" + std::to_string(k) + ".milp";
    rb::write_instance(instance, fs::path(out) / file);
    manifest << k << "," << seed << "," << file << "\n";
  }
  std::cout << "wrote " << suite.instance_count << " " << rb::describe(suite.spec)
            << " instances to " << out << "\n";
  return 0;
}

struct SolveFlags {
  std::string instance_path;
  int index = 0;
  std::string policy = "pb";
  std::string checkpoint;
  uint64_t solve_seed = 0;
  int64_t node_limit = 100000;
  double time_limit = 600.0;
  std::string trace;
};

int cmd_solve(const SuiteFlags& suite_flags, const SolveFlags& flags) {
  rb::MilpInstance instance;
  if (!flags.instance_path.empty()) {
    instance = rb::read_instance(fs::path(flags.instance_path));
  } else {
    rb::BenchmarkSuite suite = suite_flags.suite();
    instance = rb::generate_instance(suite.spec, suite.instance_seed(flags.index));
  }
  std::vector<std::string> checkpoints;
  if (!flags.checkpoint.empty()) checkpoints.push_back(flags.checkpoint);
  const std::vector<rb::PolicySpec> policies = policy_list({flags.policy}, checkpoints);
  auto policy = policies.at(0).make();
  rb::BnbConfig config;
  config.node_limit = flags.node_limit;
  config.time_limit_seconds = flags.time_limit;
  config.seed = flags.solve_seed;
  const rb::SolveReport report = rb::solve(instance, *policy, config);
  std::cout << rb::SolveReport::csv_header() << "\n" << report.csv_row() << "\n";
  if (!flags.trace.empty()) {
    std::ofstream out(flags.trace);
    report.write_trace(out, false);
    if (!out) throw std::runtime_error("failed writing trace '" + flags.trace + "'");
  }
  return 0;
}

int cmd_train(const TrainFlags& flags, const std::string& out, const std::string& resume,
              const std::string& state_out, bool quiet) {
  rb::Trainer trainer = resume.empty() ? rb::Trainer(flags.config())
                                       : rb::Trainer::load_state(resume);
  if (!quiet) std::cout << rb::train_log_header() << "\n";
  while (!trainer.finished()) {
    const rb::TrainLogRow row = trainer.run_epoch();
    if (!quiet) std::cout << rb::format_log_row(row) << "\n" << std::flush;
  }
  trainer.write_outputs(out);
  if (!state_out.empty()) trainer.save_state(state_out);
  std::cout << "epochs " << trainer.epoch() << " train_steps " << trainer.train_steps();
  if (trainer.best_eval_nodes()) std::cout << " best_eval_nodes " << *trainer.best_eval_nodes();
  std::cout << "\n";
  return 0;
}

void print_summary(const std::vector<rb::RunRecord>& records) {
  std::cout << rb::summary_header() << "\n";
  for (const rb::PolicySummary& s : rb::summarize(records)) {
    std::cout << rb::format_summary(s) << "\n";
  }
}

int cmd_bench(const SuiteFlags& flags, const std::vector<std::string>& policies,
              const std::vector<std::string>& checkpoints, const std::string& out) {
  const rb::BenchmarkSuite suite = flags.suite();
  const std::vector<rb::PolicySpec> specs = policy_list(policies, checkpoints);
  const std::vector<rb::RunRecord> records =
      rb::run_benchmark(suite, specs, {flags.threads});
  rb::write_benchmark(out, records);
  print_summary(records);
  return 0;
}

std::vector<int> parse_lengths(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stoi(item));
  if (out.empty()) throw std::invalid_argument("--lengths is empty");
  return out;
}

int cmd_sweep(const SuiteFlags& flags, const std::string& checkpoint,
              const std::string& lengths, const std::string& out) {
  if (!fs::exists(checkpoint)) {
    throw rb::MissingCheckpointError("checkpoint not found: " + checkpoint);
  }
  const rb::PolicyBundle bundle = rb::load_policy(checkpoint);
  const std::vector<int> values = parse_lengths(lengths);
  const std::vector<rb::SweepRow> rows =
      rb::trajectory_length_sweep(values, flags.suite(), bundle, {flags.threads});
  rb::write_sweep(fs::path(out) / "sweep.csv", rows);
  std::cout << rb::sweep_header() << "\n";
  for (const rb::SweepRow& row : rows) std::cout << rb::format_sweep_row(row) << "\n";
  return 0;
}

int cmd_ablate(const TrainFlags& train_flags, SuiteFlags suite_flags,
               const std::vector<std::string>& variants, const std::string& out) {
  const rb::TrainConfig config = train_flags.config();
  std::vector<rb::AblationFlags> flags;
  for (const std::string& v : variants) flags.push_back(rb::parse_ablation(v));
  rb::BenchmarkSuite suite = suite_flags.suite();
  suite.spec = config.instances;
  const std::vector<rb::AblationRun> runs =
      rb::run_ablations(config, flags, suite, out, {suite_flags.threads});
  for (const rb::AblationRun& run : runs) {
    std::cout << "trained " << run.variant << " -> " << run.policy_path.string() << "\n";
  }
  print_summary(rb::read_results(fs::path(out) / "results.csv"));
  return 0;
}

int cmd_plotdata(const std::string& input, const std::string& out) {
  for (const fs::path& file : rb::emit_plot_data(input, out)) {
    std::cout << "wrote " << file.string() << "\n";
  }
  return 0;
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const rb::MissingCheckpointError*>(&e)) return "missing_checkpoint";
  if (dynamic_cast<const rb::CsvParseError*>(&e)) return "csv_parse_error";
  if (dynamic_cast<const rb::ParseError*>(&e)) return "parse_error";
  if (dynamic_cast<const rb::CheckpointError*>(&e)) return "checkpoint_error";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
  return "runtime_error";
}

void report_error(const std::string& verb, const std::string& type, const std::string& message) {
  nlohmann::json line = {{"error", type}, {"verb", verb}, {"message", message}};
  std::cerr << line.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned branching for mixed-integer programs"};
  app.require_subcommand(1);

  SuiteFlags gen_suite;
  std::string gen_out = "instances";
  CLI::App* gen = app.add_subcommand("gen", "generate an instance suite");
  gen_suite.add(gen, false);
  gen->add_option("--out", gen_out, "output directory")->capture_default_str();

  SuiteFlags solve_suite;
  SolveFlags solve_flags;
  CLI::App* solve = app.add_subcommand("solve", "solve one instance and print its metrics");
  solve_suite.add(solve, false);
  solve->add_option("--instance", solve_flags.instance_path, "instance file (else generated)");
  solve->add_option("--index", solve_flags.index, "suite index when generating")
      ->capture_default_str();
  solve->add_option("--policy", solve_flags.policy,
                    "random, mostfrac, pb, pb-warm, sb or revibranch")
      ->capture_default_str();
  solve->add_option("--checkpoint", solve_flags.checkpoint, "learned policy file");
  solve->add_option("--solve-seed", solve_flags.solve_seed)->capture_default_str();
  solve->add_option("--node-limit", solve_flags.node_limit)->capture_default_str();
  solve->add_option("--time-limit", solve_flags.time_limit)->capture_default_str();
  solve->add_option("--out", solve_flags.trace, "write the decision trace here");

  TrainFlags train_flags;
  std::string train_out = "run", resume, state_out;
  bool quiet = false;
  CLI::App* train = app.add_subcommand("train", "train a branching policy");
  train_flags.add(train);
  train->add_option("--out", train_out, "output directory")->capture_default_str();
  train->add_option("--resume", resume, "trainer state to continue from");
  train->add_option("--state", state_out, "write the final trainer state here");
  train->add_flag("--quiet", quiet, "suppress per-epoch rows");

  SuiteFlags bench_suite;
  std::vector<std::string> bench_policies = {"random", "mostfrac", "pb", "pb-warm", "sb"};
  std::vector<std::string> bench_checkpoints;
  std::string bench_out = "bench";
  CLI::App* bench = app.add_subcommand("bench", "benchmark policies on a suite");
  bench_suite.add(bench, true);
  bench->add_option("--policy", bench_policies, "policies (repeatable; label=file for learned)")
      ->capture_default_str();
  bench->add_option("--checkpoint", bench_checkpoints, "learned policy files (repeatable)");
  bench->add_option("--out", bench_out, "output directory")->capture_default_str();

  SuiteFlags sweep_suite;
  std::string sweep_checkpoint, sweep_lengths = "10,25,50,100", sweep_out = "sweep";
  CLI::App* sweep = app.add_subcommand("sweep", "trajectory-length sweep");
  sweep_suite.add(sweep, true);
  sweep->add_option("--checkpoint", sweep_checkpoint, "learned policy file")->required();
  sweep->add_option("--lengths", sweep_lengths, "comma-separated T values")
      ->capture_default_str();
  sweep->add_option("--out", sweep_out, "output directory")->capture_default_str();

  TrainFlags ablate_train;
  SuiteFlags ablate_suite;
  std::vector<std::string> variants = {"full", "no_revival", "no_dense_rewards", "no_decoder"};
  std::string ablate_out = "ablation";
  CLI::App* ablate = app.add_subcommand("ablate", "train and compare ablation variants");
  ablate_train.add(ablate);
  ablate->add_option("--n", ablate_suite.n, "held-out instances")->capture_default_str();
  ablate->add_option("--seeds", ablate_suite.seeds, "evaluation seeds")->capture_default_str();
  ablate->add_option("--threads", ablate_suite.threads)->capture_default_str();
  ablate->add_option("--variants", variants, "variants to train")->capture_default_str();
  ablate->add_option("--out", ablate_out, "output directory")->capture_default_str();

  std::string plot_in, plot_out = "plots";
  CLI::App* plot = app.add_subcommand("plotdata", "aggregate a results or sweep CSV");
  plot->add_option("input", plot_in, "results.csv or sweep.csv")->required();
  plot->add_option("--out", plot_out, "output directory")->capture_default_str();

  std::string verb = "cli";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error(app.get_subcommands().empty() ? verb : app.get_subcommands()[0]->get_name(),
                 "usage", e.what());
    return 2;
  }

  verb = app.get_subcommands()[0]->get_name();
  try {
    if (*gen) return cmd_gen(gen_suite, gen_out);
    if (*solve) return cmd_solve(solve_suite, solve_flags);
    if (*train) return cmd_train(train_flags, train_out, resume, state_out, quiet);
    if (*bench) return cmd_bench(bench_suite, bench_policies, bench_checkpoints, bench_out);
    if (*sweep) return cmd_sweep(sweep_suite, sweep_checkpoint, sweep_lengths, sweep_out);
    if (*ablate) return cmd_ablate(ablate_train, ablate_suite, variants, ablate_out);
    if (*plot) return cmd_plotdata(plot_in, plot_out);
  } catch (const std::exception& e) {
    report_error(verb, error_type(e), e.what());
    return 1;
  }
  return 0;
}
