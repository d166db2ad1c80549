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

#include "revibranch/dqn.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "revibranch/binary_io.h"
#include "revibranch/instance_io.h"

namespace revibranch {

namespace {

constexpr char kStateMagic[8] = {'R', 'V', 'B', 'R', 'T', 'R', 'N', 'S'};
constexpr uint32_t kStateVersion = 1;
constexpr uint64_t kNetworkStream = 0x4e4554574b;
constexpr uint64_t kSampleStream = 0x534d504c;
constexpr uint64_t kInstanceStream = 0x494e5354;
constexpr uint64_t kSolveStream = 0x534f4c56;

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int64_t parse_int(const std::string& key, const std::string& value) {
  size_t used = 0;
  int64_t out = 0;
  try {
    out = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) {
    throw std::invalid_argument("option '" + key + "' expects an integer, got '" + value + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const std::exception&) {
    throw std::invalid_argument("option '" + key + "' expects a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("option '" + key + "' expects true/false, got '" + value + "'");
}

std::string fmt(bool b) { return b ? "true" : "false"; }

using Setter = std::function<void(TrainConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const TrainConfig&)>;

template <typename T>
std::pair<Setter, Getter> int_field(T TrainConfig::*field) {
  return {[field](TrainConfig& c, const std::string& k, const std::string& v) {
            c.*field = static_cast<T>(parse_int(k, v));
          },
          [field](const TrainConfig& c) { return std::to_string(c.*field); }};
}

std::pair<Setter, Getter> real_field(double TrainConfig::*field) {
  return {[field](TrainConfig& c, const std::string& k, const std::string& v) {
            c.*field = parse_real(k, v);
          },
          [field](const TrainConfig& c) { return format_double(c.*field); }};
}

// Ordered so that formatting is stable.
const std::vector<std::pair<std::string, std::pair<Setter, Getter>>>& option_table() {
  static const auto* table = new std::vector<std::pair<std::string, std::pair<Setter, Getter>>>{
      {"seed", int_field(&TrainConfig::seed)},
      {"instances.family",
       {[](TrainConfig& c, const std::string&, const std::string& v) {
          c.instances.family = parse_family(v);
        },
        [](const TrainConfig& c) { return family_name(c.instances.family); }}},
      {"instances.size1",
       {[](TrainConfig& c, const std::string& k, const std::string& v) {
          c.instances.size1 = static_cast<int>(parse_int(k, v));
        },
        [](const TrainConfig& c) { return std::to_string(c.instances.size1); }}},
      {"instances.size2",
       {[](TrainConfig& c, const std::string& k, const std::string& v) {
          c.instances.size2 = static_cast<int>(parse_int(k, v));
        },
        [](const TrainConfig& c) { return std::to_string(c.instances.size2); }}},
      {"instances.density",
       {[](TrainConfig& c, const std::string& k, const std::string& v) {
          c.instances.density = parse_real(k, v);
        },
        [](const TrainConfig& c) { return format_double(c.instances.density); }}},
      {"network.d",
       {[](TrainConfig& c, const std::string& k, const std::string& v) {
          c.network.d = static_cast<int>(parse_int(k, v));
        },
        [](const TrainConfig& c) { return std::to_string(c.network.d); }}},
      {"network.decoder_blocks",
       {[](TrainConfig& c, const std::string& k, const std::string& v) {
          c.network.decoder_blocks = static_cast<int>(parse_int(k, v));
        },
        [](const TrainConfig& c) { return std::to_string(c.network.decoder_blocks); }}},
      {"network.heads",
       {[](TrainConfig& c, const std::string& k, const std::string& v) {
          c.network.heads = static_cast<int>(parse_int(k, v));
        },
        [](const TrainConfig& c) { return std::to_string(c.network.heads); }}},
      {"network.max_actions",
       {[](TrainConfig& c, const std::string& k, const std::string& v) {
          c.network.max_actions = static_cast<int>(parse_int(k, v));
        },
        [](const TrainConfig& c) { return std::to_string(c.network.max_actions); }}},
      {"gamma", real_field(&TrainConfig::gamma)},
      {"epsilon_start", real_field(&TrainConfig::epsilon_start)},
      {"epsilon_end", real_field(&TrainConfig::epsilon_end)},
      {"epsilon_decay_decisions", int_field(&TrainConfig::epsilon_decay_decisions)},
      {"target_sync_steps", int_field(&TrainConfig::target_sync_steps)},
      {"batch_size", int_field(&TrainConfig::batch_size)},
      {"learning_rate", real_field(&TrainConfig::learning_rate)},
      {"max_grad_norm", real_field(&TrainConfig::max_grad_norm)},
      {"trajectory_length", int_field(&TrainConfig::trajectory_length)},
      {"buffer_capacity", int_field(&TrainConfig::buffer_capacity)},
      {"learning_starts", int_field(&TrainConfig::learning_starts)},
      {"priority_alpha", real_field(&TrainConfig::priority_alpha)},
      {"priority_beta", real_field(&TrainConfig::priority_beta)},
      {"reward_signal",
       {[](TrainConfig& c, const std::string&, const std::string& v) {
          c.reward_signal = parse_reward_signal(v);
        },
        [](const TrainConfig& c) { return to_string(c.reward_signal); }}},
      {"ablation.no_revival",
       {[](TrainConfig& c, const std::string& k, const std::string& v) {
          c.ablation.no_revival = parse_bool(k, v);
        },
        [](const TrainConfig& c) { return fmt(c.ablation.no_revival); }}},
      {"ablation.no_dense_rewards",
       {[](TrainConfig& c, const std::string& k, const std::string& v) {
          c.ablation.no_dense_rewards = parse_bool(k, v);
        },
        [](const TrainConfig& c) { return fmt(c.ablation.no_dense_rewards); }}},
      {"ablation.no_decoder",
       {[](TrainConfig& c, const std::string& k, const std::string& v) {
          c.ablation.no_decoder = parse_bool(k, v);
        },
        [](const TrainConfig& c) { return fmt(c.ablation.no_decoder); }}},
      {"max_epochs", int_field(&TrainConfig::max_epochs)},
      {"train_steps_per_epoch", int_field(&TrainConfig::train_steps_per_epoch)},
      {"eval_every", int_field(&TrainConfig::eval_every)},
      {"validation_size", int_field(&TrainConfig::validation_size)},
      {"patience", int_field(&TrainConfig::patience)},
      {"episode_node_limit", int_field(&TrainConfig::episode_node_limit)},
      {"eval_node_limit", int_field(&TrainConfig::eval_node_limit)},
  };
  return *table;
}

std::string optional_to_string(const std::optional<double>& v) {
  return v ? format_double(*v) : "";
}

std::optional<double> optional_from_string(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

TrainLogRow parse_log_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  while (cells.size() < 5) cells.emplace_back();
  TrainLogRow row;
  row.epoch = std::stoll(cells[0]);
  row.loss = optional_from_string(cells[1]);
  row.epsilon = parse_double(cells[2]);
  row.eval_nodes = optional_from_string(cells[3]);
  row.eval_lp_iterations = optional_from_string(cells[4]);
  return row;
}

}  // namespace

std::string ablation_name(const AblationFlags& flags) {
  std::vector<std::string> parts;
  if (flags.no_revival) parts.emplace_back("no_revival");
  if (flags.no_dense_rewards) parts.emplace_back("no_dense_rewards");
  if (flags.no_decoder) parts.emplace_back("no_decoder");
  if (parts.empty()) return "full";
  std::string out = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) out += "+" + parts[i];
  return out;
}

AblationFlags parse_ablation(const std::string& name) {
  AblationFlags flags;
  if (name == "full" || name.empty()) return flags;
  std::stringstream in(name);
  std::string part;
  while (std::getline(in, part, '+')) {
    if (part == "no_revival") {
      flags.no_revival = true;
    } else if (part == "no_dense_rewards") {
      flags.no_dense_rewards = true;
    } else if (part == "no_decoder") {
      flags.no_decoder = true;
    } else {
      throw std::invalid_argument("unknown ablation '" + part + "'");
    }
  }
  return flags;
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid training config: ") + what);
  };
  require(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");
  require(epsilon_start >= 0.0 && epsilon_start <= 1.0, "epsilon_start must lie in [0, 1]");
  require(epsilon_end >= 0.0 && epsilon_end <= 1.0, "epsilon_end must lie in [0, 1]");
  require(epsilon_decay_decisions > 0, "epsilon_decay_decisions must be positive");
  require(target_sync_steps > 0, "target_sync_steps must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(max_grad_norm >= 0.0, "max_grad_norm must be non-negative");
  require(trajectory_length > 0, "trajectory_length must be positive");
  require(buffer_capacity > 0, "buffer_capacity must be positive");
  require(learning_starts >= 0, "learning_starts must be non-negative");
  require(priority_alpha >= 0.0 && priority_beta >= 0.0, "priority exponents must be >= 0");
  require(max_epochs >= 0, "max_epochs must be non-negative");
  require(train_steps_per_epoch >= 0, "train_steps_per_epoch must be non-negative");
  require(eval_every >= 0, "eval_every must be non-negative");
  require(validation_size > 0, "validation_size must be positive");
  require(patience >= 0, "patience must be non-negative");
  require(episode_node_limit > 0 && eval_node_limit > 0, "node limits must be positive");
  require(instances.size1 > 0 && instances.size2 > 0, "instance sizes must be positive");
}

void set_train_option(TrainConfig& config, const std::string& key, const std::string& value) {
  for (const auto& [name, accessors] : option_table()) {
    if (name == key) {
      accessors.first(config, key, value);
      return;
    }
  }
  throw std::invalid_argument("unknown training option '" + key + "'");
}

TrainConfig parse_train_config(const std::string& text) {
  TrainConfig config;
  std::stringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_number) +
                                  ": expected 'key = value'");
    }
    try {
      set_train_option(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_number) + ": " +
                                  e.what());
    }
  }
  config.validate();
  return config;
}

TrainConfig read_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  std::stringstream text;
  text << in.rdbuf();
  return parse_train_config(text.str());
}

std::string format_train_config(const TrainConfig& config) {
  std::string out;
  for (const auto& [name, accessors] : option_table()) {
    out += name + " = " + accessors.second(config) + "\n";
  }
  return out;
}

std::vector<std::string> train_option_keys() {
  std::vector<std::string> keys;
  for (const auto& entry : option_table()) keys.push_back(entry.first);
  return keys;
}

RewardSignal effective_reward_signal(const TrainConfig& config) {
  return config.ablation.no_dense_rewards ? RewardSignal::kBase : config.reward_signal;
}

LearnedPolicyOptions policy_options(const TrainConfig& config, double epsilon) {
  LearnedPolicyOptions options;
  options.trajectory_length = config.trajectory_length;
  options.use_history = !config.ablation.no_revival;
  options.use_decoder = !config.ablation.no_decoder;
  options.epsilon = epsilon;
  return options;
}

CollectedEpisode collect_episode(const MilpInstance& instance, const ReviBranchNet& net,
                                 const LearnedPolicyOptions& options, uint64_t seed,
                                 int64_t node_limit) {
  LearnedPolicy policy(net, options);
  BnbConfig config;
  config.node_limit = node_limit;
  config.seed = seed;
  CollectedEpisode out;
  out.report = solve(instance, policy, config);
  if (policy.actions().size() != out.report.decisions.size()) {
    throw std::logic_error("collect_episode: policy and engine disagree on decisions");
  }
  out.graphs = policy.graphs();
  out.actions = policy.actions();
  out.eager_steps = policy.eager_steps();
  if (!out.actions.empty()) {
    out.base = base_rewards(out.report.decisions);
    out.shaped = iwrr(out.base);
  }
  return out;
}

std::string train_log_header() { return "epoch,loss,epsilon,eval_nodes,eval_lp_iterations"; }

std::string format_log_row(const TrainLogRow& row) {
  return std::to_string(row.epoch) + "," + optional_to_string(row.loss) + "," +
         format_double(row.epsilon) + "," + optional_to_string(row.eval_nodes) + "," +
         optional_to_string(row.eval_lp_iterations);
}

Trainer::Trainer(TrainConfig config)
    : config_(std::move(config)),
      buffer_(config_.buffer_capacity),
      sample_rng_(mix_seed(config_.seed, kSampleStream)) {
  config_.validate();
  NetworkConfig net_config = config_.network;
  net_config.seed = mix_seed(config_.seed, kNetworkStream);
  online_ = std::make_unique<ReviBranchNet>(net_config);
  target_ = std::make_unique<ReviBranchNet>(net_config);
  best_ = std::make_unique<ReviBranchNet>(net_config);
  for (int k = 0; k < config_.validation_size; ++k) {
    validation_.push_back(
        generate_instance(config_.instances, kValidationSeedBase + static_cast<uint64_t>(k)));
  }
}

double Trainer::epsilon() const {
  const double frac = std::min(1.0, static_cast<double>(decisions_) /
                                        static_cast<double>(config_.epsilon_decay_decisions));
  return config_.epsilon_start + (config_.epsilon_end - config_.epsilon_start) * frac;
}

CollectedEpisode Trainer::collect(const MilpInstance& instance, double epsilon,
                                  uint64_t seed) {
  CollectedEpisode episode = collect_episode(instance, *online_,
                                             policy_options(config_, epsilon), seed,
                                             config_.episode_node_limit);
  if (!episode.actions.empty()) {
    const std::vector<double> rewards =
        select_rewards(episode.shaped, episode.base, effective_reward_signal(config_));
    buffer_.store_episode(episode.graphs, episode.actions, rewards);
    decisions_ += static_cast<int64_t>(episode.actions.size());
  }
  return episode;
}

namespace {

Tensor window_for(const ReplayBuffer& buffer, int64_t episode_id, int end,
                  const TrainConfig& config, const ReviBranchNet& net) {
  if (config.ablation.no_revival || config.ablation.no_decoder || end < 0) {
    return net.start_token();
  }
  return revive_trajectory(buffer, episode_id, end, config.trajectory_length, net).r_traj;
}

}  // namespace

TrainStepResult Trainer::train_step() {
  if (buffer_.num_transitions() < config_.batch_size) {
    throw std::invalid_argument("train_step: buffer holds " +
                                std::to_string(buffer_.num_transitions()) +
                                " transitions, batch needs " +
                                std::to_string(config_.batch_size));
  }
  const bool use_decoder = !config_.ablation.no_decoder;
  const SampledBatch batch = buffer_.sample(config_.batch_size, config_.priority_alpha,
                                            config_.priority_beta, sample_rng_);
  TrainStepResult result;
  result.refs = batch.refs;
  result.weights = batch.weights;
  online_->params().zero_grad();
  Tensor total;
  std::vector<double> td_errors;
  const double inv_batch = 1.0 / static_cast<double>(config_.batch_size);
  for (size_t b = 0; b < batch.refs.size(); ++b) {
    const TransitionRef& ref = batch.refs[b];
    const Transition& t = buffer_.transition(ref);
    double y = t.reward;
    if (!t.terminal) {
      NoGradGuard no_grad;
      const Transition& next = buffer_.transition({ref.episode_id, ref.step + 1});
      const Tensor q_next = target_->q_values(
          target_->gcn_encode(next.graph),
          window_for(buffer_, ref.episode_id, ref.step, config_, *target_), use_decoder);
      const std::vector<double> masked = masked_q(q_next, next.graph.candidate_mask);
      y += config_.gamma * masked[greedy_action(q_next, next.graph.candidate_mask)];
    }
    const Tensor q = online_->q_values(
        online_->gcn_encode(t.graph),
        window_for(buffer_, ref.episode_id, ref.step - 1, config_, *online_), use_decoder);
    const Tensor q_sa = element(q, t.action, 0);
    const Tensor term =
        scale(square(sub(q_sa, Tensor::constant(Matrix::Constant(1, 1, y)))),
              batch.weights[b] * inv_batch);
    total = total.defined() ? add(total, term) : term;
    result.q.push_back(q_sa.item());
    result.targets.push_back(y);
    td_errors.push_back(y - q_sa.item());
  }
  result.loss = total.item();
  if (!std::isfinite(result.loss)) throw NonFiniteError("train_step loss");
  total.backward();
  AdamConfig adam;
  adam.learning_rate = config_.learning_rate;
  adam.max_grad_norm = config_.max_grad_norm;
  online_->params().adam_step(adam);
  buffer_.update_priorities(batch.refs, td_errors);
  ++train_steps_;
  if (train_steps_ % config_.target_sync_steps == 0) {
    target_->params().copy_values_from(online_->params());
  }
  return result;
}

TrainLogRow Trainer::run_epoch() {
  const uint64_t e = static_cast<uint64_t>(epoch_);
  const double eps = epsilon();
  const uint64_t instance_seed =
      kTrainSeedBase + mix_seed(mix_seed(config_.seed, kInstanceStream), e) % kSeedRangeWidth;
  collect(generate_instance(config_.instances, instance_seed), eps,
          mix_seed(mix_seed(config_.seed, kSolveStream), e));
  std::vector<double> losses;
  for (int k = 0; k < config_.train_steps_per_epoch; ++k) {
    if (buffer_.num_transitions() < std::max<int64_t>(config_.batch_size, config_.learning_starts)) {
      break;
    }
    losses.push_back(train_step().loss);
  }
  ++epoch_;
  TrainLogRow row;
  row.epoch = epoch_;
  row.epsilon = eps;
  if (!losses.empty()) row.loss = arithmetic_mean(losses);
  if (config_.eval_every > 0 && epoch_ % config_.eval_every == 0) {
    const EvalResult eval = evaluate(*online_);
    row.eval_nodes = eval.geomean_nodes;
    row.eval_lp_iterations = eval.geomean_lp_iterations;
    if (!best_eval_nodes_ || eval.geomean_nodes < *best_eval_nodes_) {
      best_eval_nodes_ = eval.geomean_nodes;
      best_->params().copy_values_from(online_->params());
      evals_since_best_ = 0;
    } else {
      ++evals_since_best_;
      if (config_.patience > 0 && evals_since_best_ >= config_.patience) stopped_early_ = true;
    }
  }
  log_.push_back(row);
  return row;
}

bool Trainer::finished() const { return stopped_early_ || epoch_ >= config_.max_epochs; }

void Trainer::run() {
  while (!finished()) run_epoch();
}

EvalResult Trainer::evaluate(const ReviBranchNet& net) const {
  EvalResult out;
  std::vector<double> nodes, lp;
  for (const MilpInstance& instance : validation_) {
    const CollectedEpisode episode = collect_episode(
        instance, net, policy_options(config_, 0.0), 0, config_.eval_node_limit);
    out.nodes.push_back(episode.report.node_count);
    out.lp_iterations.push_back(episode.report.lp_iterations);
    nodes.push_back(static_cast<double>(episode.report.node_count));
    lp.push_back(static_cast<double>(episode.report.lp_iterations));
  }
  out.geomean_nodes = geometric_mean(nodes);
  out.geomean_lp_iterations = geometric_mean(lp);
  return out;
}

PolicyBundle Trainer::bundle(const ReviBranchNet& net) const {
  PolicyBundle b;
  b.net = std::make_shared<ReviBranchNet>(net.config());
  b.net->params().copy_values_from(net.params());
  b.options = policy_options(config_, 0.0);
  return b;
}

void Trainer::write_outputs(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream log(dir / "train_log.csv");
    log << train_log_header() << "\n";
    for (const TrainLogRow& row : log_) log << format_log_row(row) << "\n";
    if (!log) throw std::runtime_error("failed writing training log");
  }
  {
    std::ofstream cfg(dir / "config.txt");
    cfg << format_train_config(config_);
  }
  // Without any validation the final weights double as the best ones.
  save_policy(bundle(best_eval_nodes_ ? *best_ : *online_), dir / "best.policy");
  save_policy(bundle(*online_), dir / "last.policy");
}

void Trainer::save_state(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  out.write(kStateMagic, sizeof(kStateMagic));
  write_pod<uint32_t>(out, kStateVersion);
  write_string(out, format_train_config(config_));
  save_network(*online_, out);
  save_network(*target_, out);
  save_network(*best_, out);
  buffer_.save(out);
  write_string(out, sample_rng_.state());
  write_pod<int64_t>(out, epoch_);
  write_pod<int64_t>(out, decisions_);
  write_pod<int64_t>(out, train_steps_);
  write_pod<uint8_t>(out, best_eval_nodes_ ? 1 : 0);
  write_pod<double>(out, best_eval_nodes_.value_or(0.0));
  write_pod<int64_t>(out, evals_since_best_);
  write_pod<uint8_t>(out, stopped_early_ ? 1 : 0);
  write_pod<uint64_t>(out, log_.size());
  for (const TrainLogRow& row : log_) write_string(out, format_log_row(row));
  if (!out) throw CheckpointError("failed writing trainer state");
}

Trainer Trainer::load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("trainer state '" + path.string() + "' not found");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kStateMagic, sizeof(kStateMagic)) != 0) {
    throw CheckpointError("'" + path.string() + "' is not a trainer state");
  }
  if (read_pod<uint32_t>(in) != kStateVersion) {
    throw CheckpointError("unsupported trainer state version");
  }
  Trainer trainer(parse_train_config(read_string(in)));
  trainer.load_from(in);
  return trainer;
}

void Trainer::load_from(std::istream& in) {
  *online_ = load_network(in);
  *target_ = load_network(in);
  *best_ = load_network(in);
  buffer_ = ReplayBuffer::load(in);
  sample_rng_.set_state(read_string(in));
  epoch_ = read_pod<int64_t>(in);
  decisions_ = read_pod<int64_t>(in);
  train_steps_ = read_pod<int64_t>(in);
  const bool has_best = read_pod<uint8_t>(in) != 0;
  const double best = read_pod<double>(in);
  best_eval_nodes_ = has_best ? std::optional<double>(best) : std::nullopt;
  evals_since_best_ = read_pod<int64_t>(in);
  stopped_early_ = read_pod<uint8_t>(in) != 0;
  const uint64_t rows = read_pod<uint64_t>(in);
  log_.clear();
  for (uint64_t k = 0; k < rows; ++k) log_.push_back(parse_log_row(read_string(in)));
}

bool Trainer::state_equal(const Trainer& other) const {
  return config_ == other.config_ && online_->params().state_equal(other.online_->params()) &&
         target_->params().state_equal(other.target_->params()) &&
         best_->params().state_equal(other.best_->params()) && buffer_ == other.buffer_ &&
         sample_rng_ == other.sample_rng_ && epoch_ == other.epoch_ &&
         decisions_ == other.decisions_ && train_steps_ == other.train_steps_ &&
         best_eval_nodes_ == other.best_eval_nodes_ &&
         evals_since_best_ == other.evals_since_best_ &&
         stopped_early_ == other.stopped_early_ && log_ == other.log_;
}

}  // namespace revibranch
