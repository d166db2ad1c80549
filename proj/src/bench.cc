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

#include "revibranch/bench.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "revibranch/metrics.h"
#include "revibranch/policies.h"
#include "revibranch/random.h"

namespace revibranch {

namespace {

constexpr double kSetCoverDeskDensity = 0.1;
constexpr double kSetCoverTinyDensity = 0.4;
constexpr double kSetCoverFullDensity = 0.05;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

int scaled(int size, double factor) {
  return std::max(1, static_cast<int>(std::lround(size * factor)));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_number(const std::string& text, const std::string& what, int line) {
  try {
    size_t used = 0;
    const double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw CsvParseError("line " + std::to_string(line) + ": bad " + what + " '" + text + "'");
}

uint64_t parse_unsigned(const std::string& text, const std::string& what, int line) {
  try {
    size_t used = 0;
    const unsigned long long value = std::stoull(text, &used);
    if (used == text.size() && !text.empty() && text[0] != '-') return value;
  } catch (const std::exception&) {
  }
  throw CsvParseError("line " + std::to_string(line) + ": bad " + what + " '" + text + "'");
}

SolveStatus parse_status(const std::string& text, int line) {
  for (SolveStatus s : {SolveStatus::kOptimal, SolveStatus::kInfeasible,
                        SolveStatus::kUnbounded, SolveStatus::kLimit,
                        SolveStatus::kNumericalError}) {
    if (to_string(s) == text) return s;
  }
  throw CsvParseError("line " + std::to_string(line) + ": bad status '" + text + "'");
}

// Runs task(i) for i in [0, count) on a pool; rethrows the lowest-index failure.
template <typename Task>
void parallel_for(size_t count, int threads, Task task) {
  size_t workers = threads > 0 ? static_cast<size_t>(threads)
                               : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string tier_name(Tier tier) {
  switch (tier) {
    case Tier::kTiny:
      return "tiny";
    case Tier::kEasy:
      return "easy";
    case Tier::kMedium:
      return "medium";
    case Tier::kHard:
      return "hard";
  }
  throw std::invalid_argument("unknown tier");
}

Tier parse_tier(const std::string& name) {
  for (Tier t : {Tier::kTiny, Tier::kEasy, Tier::kMedium, Tier::kHard}) {
    if (tier_name(t) == name) return t;
  }
  throw std::invalid_argument("unknown tier '" + name + "' (tiny, easy, medium, hard)");
}

InstanceSpec tier_spec(Family family, Tier tier, bool full_scale, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
  // Rows: easy, medium, hard. Desk sizes are 25/50/100% of full-scale easy.
  static constexpr int kFullScale[3][3][2] = {
      {{200, 400}, {500, 1000}, {1000, 1500}},
      {{20, 60}, {30, 80}, {50, 100}},
      {{10, 15}, {25, 25}, {40, 30}}};
  static constexpr int kDesk[3][3][2] = {
      {{50, 100}, {100, 200}, {200, 400}},
      {{5, 15}, {10, 30}, {20, 60}},
      {{3, 4}, {5, 8}, {10, 15}}};
  const int f = static_cast<int>(family);
  InstanceSpec spec;
  spec.family = family;
  spec.density = family == Family::kSetCovering ? kSetCoverDeskDensity : 0.0;
  int size1 = 0, size2 = 0;
  if (tier == Tier::kTiny) {
    if (family == Family::kSetCovering) {
      size1 = 20;
      size2 = 40;
      spec.density = kSetCoverTinyDensity;
    } else {
      size1 = kDesk[f][0][0];
      size2 = kDesk[f][0][1];
    }
  } else {
    const int t = static_cast<int>(tier) - 1;
    const auto& table = full_scale ? kFullScale : kDesk;
    size1 = table[f][t][0];
    size2 = table[f][t][1];
    if (full_scale && family == Family::kSetCovering) spec.density = kSetCoverFullDensity;
  }
  spec.size1 = scaled(size1, factor);
  spec.size2 = scaled(size2, factor);
  return spec;
}

uint64_t BenchmarkSuite::instance_seed(int index) const {
  return kTestSeedBase + mix_seed(suite_seed, static_cast<uint64_t>(index)) % kSeedRangeWidth;
}

uint64_t BenchmarkSuite::solve_seed(int index, uint64_t seed) const {
  return mix_seed(instance_seed(index), seed);
}

std::vector<MilpInstance> BenchmarkSuite::instances() const {
  std::vector<MilpInstance> out;
  out.reserve(instance_count);
  for (int k = 0; k < instance_count; ++k) {
    out.push_back(generate_instance(spec, instance_seed(k)));
  }
  return out;
}

BenchmarkSuite make_suite(Family family, Tier tier, int instance_count, uint64_t suite_seed,
                          bool full_scale, double factor) {
  if (instance_count < 0) throw std::invalid_argument("instance count must be >= 0");
  BenchmarkSuite suite;
  suite.spec = tier_spec(family, tier, full_scale, factor);
  suite.tier = tier_name(tier);
  suite.instance_count = instance_count;
  suite.suite_seed = suite_seed;
  return suite;
}

std::unique_ptr<BranchingPolicy> PolicySpec::make() const {
  if (bundle) return std::make_unique<LearnedPolicy>(*bundle->net, bundle->options);
  return make_classic_policy(classic);
}

PolicySpec classic_policy(const std::string& name) {
  make_classic_policy(name);  // validates the name
  return PolicySpec{name, name, std::nullopt};
}

PolicySpec learned_policy(const std::string& label, PolicyBundle bundle) {
  if (!bundle.net) throw std::invalid_argument("learned policy '" + label + "' has no network");
  return PolicySpec{label, "", std::move(bundle)};
}

PolicySpec learned_policy(const std::string& label, const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingCheckpointError("checkpoint for policy '" + label + "' not found: " +
                                 path.string());
  }
  return learned_policy(label, load_policy(path));
}

PolicySpec parse_policy(const std::string& text) {
  const size_t eq = text.find('=');
  if (eq == std::string::npos) return classic_policy(text);
  const std::string label = text.substr(0, eq);
  if (label.empty()) throw std::invalid_argument("policy '" + text + "' needs a label");
  return learned_policy(label, std::filesystem::path(text.substr(eq + 1)));
}

std::string results_header() {
  return "family,tier,instance,instance_seed,policy,seed,status,nodes,lp_iterations,"
         "objective,wall_time";
}

std::string format_record(const RunRecord& r, bool include_wall_time) {
  std::string out = r.family + "," + r.tier + "," + r.instance + "," +
                    std::to_string(r.instance_seed) + "," + r.policy + "," +
                    std::to_string(r.seed) + "," + to_string(r.status) + "," +
                    std::to_string(r.nodes) + "," + std::to_string(r.lp_iterations) + "," +
                    num(r.objective);
  if (include_wall_time) out += "," + num(r.wall_time);
  return out;
}

std::vector<RunRecord> parse_results(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw CsvParseError("results CSV is empty (no header)");
  if (strip_cr(line) != results_header()) {
    throw CsvParseError("line 1: unexpected results header '" + strip_cr(line) + "'");
  }
  std::vector<RunRecord> out;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 11) {
      throw CsvParseError("line " + std::to_string(number) + ": expected 11 fields, got " +
                          std::to_string(f.size()));
    }
    RunRecord r;
    r.family = f[0];
    r.tier = f[1];
    r.instance = f[2];
    r.instance_seed = parse_unsigned(f[3], "instance_seed", number);
    r.policy = f[4];
    r.seed = parse_unsigned(f[5], "seed", number);
    r.status = parse_status(f[6], number);
    r.nodes = static_cast<int64_t>(parse_unsigned(f[7], "nodes", number));
    r.lp_iterations = static_cast<int64_t>(parse_unsigned(f[8], "lp_iterations", number));
    r.objective = parse_number(f[9], "objective", number);
    r.wall_time = parse_number(f[10], "wall_time", number);
    if (r.policy.empty()) throw CsvParseError("line " + std::to_string(number) + ": empty policy");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RunRecord> read_results(const std::filesystem::path& path) {
  return parse_results(read_text(path));
}

namespace {

// policy -> instance seed -> per-seed values.
struct Grouped {
  std::vector<std::string> order;
  std::map<std::string, std::map<uint64_t, std::vector<const RunRecord*>>> runs;
};

Grouped group(std::span<const RunRecord> records) {
  Grouped g;
  for (const RunRecord& r : records) {
    if (!g.runs.count(r.policy)) g.order.push_back(r.policy);
    g.runs[r.policy][r.instance_seed].push_back(&r);
  }
  return g;
}

}  // namespace

std::vector<double> instance_means(std::span<const RunRecord> records,
                                   const std::string& policy, bool lp_iterations) {
  const Grouped g = group(records);
  std::vector<double> out;
  auto it = g.runs.find(policy);
  if (it == g.runs.end()) return out;
  for (const auto& [seed, runs] : it->second) {
    std::vector<double> values;
    for (const RunRecord* r : runs) {
      values.push_back(static_cast<double>(lp_iterations ? r->lp_iterations : r->nodes));
    }
    out.push_back(arithmetic_mean(values));
  }
  return out;
}

std::vector<PolicySummary> summarize(std::span<const RunRecord> records) {
  const Grouped g = group(records);
  std::vector<PolicySummary> out;
  for (const std::string& policy : g.order) {
    PolicySummary s;
    s.policy = policy;
    std::vector<double> node_means, lp_means, node_std, lp_std;
    for (const auto& [seed, runs] : g.runs.at(policy)) {
      std::vector<double> nodes, lp;
      for (const RunRecord* r : runs) {
        nodes.push_back(static_cast<double>(r->nodes));
        lp.push_back(static_cast<double>(r->lp_iterations));
        if (r->status == SolveStatus::kLimit) ++s.limit_hits;
        ++s.runs;
      }
      node_means.push_back(arithmetic_mean(nodes));
      lp_means.push_back(arithmetic_mean(lp));
      node_std.push_back(std_percent(nodes));
      lp_std.push_back(std_percent(lp));
    }
    s.instances = static_cast<int>(node_means.size());
    s.geomean_nodes = geometric_mean(node_means);
    s.geomean_lp_iterations = geometric_mean(lp_means);
    s.nodes_std_pct = arithmetic_mean(node_std);
    s.lp_std_pct = arithmetic_mean(lp_std);
    out.push_back(s);
  }
  return out;
}

std::string summary_metadata() {
  return "# geomean = exp(mean(log(max(m, 1)))) over per-instance means m across seeds "
         "(zero counts shifted to 1); std_pct = mean over instances of population "
         "std / mean * 100";
}

std::string summary_header() {
  return "policy,instances,runs,geomean_nodes,nodes_std_pct,geomean_lp_iterations,"
         "lp_std_pct,limit_hits";
}

std::string format_summary(const PolicySummary& s) {
  return s.policy + "," + std::to_string(s.instances) + "," + std::to_string(s.runs) + "," +
         num(s.geomean_nodes) + "," + num(s.nodes_std_pct) + "," +
         num(s.geomean_lp_iterations) + "," + num(s.lp_std_pct) + "," +
         std::to_string(s.limit_hits);
}

std::vector<RunRecord> run_benchmark(const BenchmarkSuite& suite,
                                     std::span<const PolicySpec> policies,
                                     const BenchmarkOptions& options) {
  if (suite.seeds.empty()) throw std::invalid_argument("benchmark needs at least one seed");
  const std::vector<MilpInstance> instances = suite.instances();
  const size_t per_policy = instances.size() * suite.seeds.size();
  std::vector<RunRecord> records(policies.size() * per_policy);
  parallel_for(records.size(), options.threads, [&](size_t task) {
    const PolicySpec& spec = policies[task / per_policy];
    const int index = static_cast<int>((task % per_policy) / suite.seeds.size());
    const uint64_t seed = suite.seeds[task % suite.seeds.size()];
    const MilpInstance& instance = instances[index];

    std::unique_ptr<BranchingPolicy> policy = spec.make();
    BnbConfig config;
    config.node_limit = suite.node_limit;
    config.time_limit_seconds = suite.time_limit_seconds;
    config.seed = suite.solve_seed(index, seed);
    const SolveReport report = solve(instance, *policy, config);

    RunRecord& r = records[task];
    r.family = family_name(suite.spec.family);
    r.tier = suite.tier;
    r.instance = instance.name.empty() ? describe(suite.spec) : instance.name;
    r.instance_seed = suite.instance_seed(index);
    r.policy = spec.label;
    r.seed = seed;
    r.status = report.status;
    r.nodes = report.node_count;
    r.lp_iterations = report.lp_iterations;
    r.objective = report.objective;
    r.wall_time = report.wall_time_seconds;
    if (const auto* learned = dynamic_cast<const LearnedPolicy*>(policy.get())) {
      r.inference_seconds = learned->inference_seconds();
      r.greedy_decisions = learned->greedy_decisions();
    }
  });
  return records;
}

void write_benchmark(const std::filesystem::path& dir, std::span<const RunRecord> records) {
  std::filesystem::create_directories(dir);
  std::string results = results_header() + "\n";
  for (const RunRecord& r : records) results += format_record(r) + "\n";
  write_text(dir / "results.csv", results);
  std::string summary = summary_metadata() + "\n" + summary_header() + "\n";
  for (const PolicySummary& s : summarize(records)) summary += format_summary(s) + "\n";
  write_text(dir / "summary.csv", summary);
}

std::string sweep_header() {
  return "T,instances,runs,geomean_nodes,nodes_std_pct,decisions,mean_inference_ms";
}

std::string format_sweep_row(const SweepRow& row) {
  return std::to_string(row.trajectory_length) + "," + std::to_string(row.instances) + "," +
         std::to_string(row.runs) + "," + num(row.geomean_nodes) + "," +
         num(row.nodes_std_pct) + "," + std::to_string(row.decisions) + "," +
         num(row.mean_inference_ms);
}

std::vector<SweepRow> trajectory_length_sweep(std::span<const int> lengths,
                                              const BenchmarkSuite& suite,
                                              const PolicyBundle& bundle,
                                              const BenchmarkOptions& options) {
  std::vector<SweepRow> rows;
  for (int length : lengths) {
    if (length < 1) throw std::invalid_argument("trajectory length must be >= 1");
    PolicyBundle variant = bundle;
    variant.options.trajectory_length = length;
    variant.options.epsilon = 0.0;
    const PolicySpec spec = learned_policy("T=" + std::to_string(length), variant);
    const std::vector<RunRecord> records =
        run_benchmark(suite, std::span<const PolicySpec>(&spec, 1), options);
    SweepRow row;
    row.trajectory_length = length;
    double seconds = 0.0;
    for (const RunRecord& r : records) {
      row.decisions += r.greedy_decisions;
      seconds += r.inference_seconds;
    }
    const std::vector<PolicySummary> summary = summarize(records);
    if (!summary.empty()) {
      row.instances = summary[0].instances;
      row.runs = summary[0].runs;
      row.geomean_nodes = summary[0].geomean_nodes;
      row.nodes_std_pct = summary[0].nodes_std_pct;
    }
    row.mean_inference_ms = row.decisions > 0 ? 1000.0 * seconds / row.decisions : 0.0;
    rows.push_back(row);
  }
  return rows;
}

void write_sweep(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::string text = sweep_header() + "\n";
  for (const SweepRow& row : rows) text += format_sweep_row(row) + "\n";
  write_text(path, text);
}

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& csv,
                                                  const std::filesystem::path& out_dir) {
  const std::string text = read_text(csv);
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw CsvParseError("'" + csv.string() + "' is empty");
  header = strip_cr(header);
  std::filesystem::create_directories(out_dir);

  if (header == results_header()) {
    const std::filesystem::path out = out_dir / "bars.tsv";
    std::string table =
        "label\tgeomean_nodes\tnodes_std_pct\tgeomean_lp_iterations\tlp_std_pct\n";
    for (const PolicySummary& s : summarize(parse_results(text))) {
      table += s.policy + "\t" + num(s.geomean_nodes) + "\t" + num(s.nodes_std_pct) + "\t" +
               num(s.geomean_lp_iterations) + "\t" + num(s.lp_std_pct) + "\n";
    }
    write_text(out, table);
    return {out};
  }
  if (header == sweep_header()) {
    const std::filesystem::path out = out_dir / "sweep_curve.tsv";
    std::string table = "T\tgeomean_nodes\tmean_inference_ms\n";
    std::string line;
    int number = 1;
    while (std::getline(in, line)) {
      ++number;
      line = strip_cr(line);
      if (line.empty()) continue;
      const std::vector<std::string> f = split(line, ',');
      if (f.size() != 7) {
        throw CsvParseError("line " + std::to_string(number) + ": expected 7 fields, got " +
                            std::to_string(f.size()));
      }
      const uint64_t t = parse_unsigned(f[0], "T", number);
      table += std::to_string(t) + "\t" + num(parse_number(f[3], "geomean_nodes", number)) +
               "\t" + num(parse_number(f[6], "mean_inference_ms", number)) + "\n";
    }
    write_text(out, table);
    return {out};
  }
  throw CsvParseError("line 1: '" + csv.string() + "' is neither a results nor a sweep CSV");
}

std::vector<AblationRun> run_ablations(const TrainConfig& base,
                                       std::span<const AblationFlags> variants,
                                       const BenchmarkSuite& suite,
                                       const std::filesystem::path& out_dir,
                                       const BenchmarkOptions& options) {
  std::vector<AblationRun> runs;
  std::vector<PolicySpec> policies;
  for (const AblationFlags& flags : variants) {
    TrainConfig config = base;
    config.ablation = flags;
    Trainer trainer(config);
    trainer.run();
    AblationRun run;
    run.variant = ablation_name(flags);
    const std::filesystem::path dir = out_dir / run.variant;
    trainer.write_outputs(dir);
    run.policy_path = dir / "best.policy";
    run.best_eval_nodes = trainer.best_eval_nodes();
    policies.push_back(learned_policy(run.variant, run.policy_path));
    runs.push_back(run);
  }
  write_benchmark(out_dir, run_benchmark(suite, policies, options));
  return runs;
}

}  // namespace revibranch
