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

#include "revibranch/network.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "revibranch/binary_io.h"

namespace revibranch {

namespace {

constexpr char kNetMagic[8] = {'R', 'V', 'B', 'R', 'N', 'E', 'T', '1'};
constexpr uint32_t kNetVersion = 1;

std::string block_name(int b, const char* part) {
  return "dec" + std::to_string(b) + "." + part;
}

void add_linear(ParameterStore& store, const std::string& prefix, int in, int out,
                Rng& rng) {
  store.add(prefix + ".w", in, out, Init::kGlorot, rng);
  store.add(prefix + ".b", 1, out, Init::kZeros, rng);
}

void add_mlp2(ParameterStore& store, const std::string& prefix, int in, int hidden,
              int out, Rng& rng) {
  add_linear(store, prefix + "1", in, hidden, rng);
  add_linear(store, prefix + "2", hidden, out, rng);
}

void add_attention(ParameterStore& store, const std::string& prefix, int d,
                   bool output_projection, Rng& rng) {
  store.add(prefix + ".q", d, d, Init::kGlorot, rng);
  store.add(prefix + ".k", d, d, Init::kGlorot, rng);
  store.add(prefix + ".v", d, d, Init::kGlorot, rng);
  if (output_projection) store.add(prefix + ".o", d, d, Init::kGlorot, rng);
}

Tensor matrix_from(const std::vector<double>& data, int rows, int cols) {
  Matrix m(rows, cols);
  if (rows * cols > 0) std::memcpy(m.data(), data.data(), sizeof(double) * rows * cols);
  return Tensor::constant(std::move(m));
}

}  // namespace

Matrix positional_encoding(int position, int d) {
  Matrix pe(1, d);
  for (int k = 0; k < d; ++k) {
    const int even = k - (k % 2);
    const double angle =
        position / std::pow(10000.0, static_cast<double>(even) / static_cast<double>(d));
    pe(0, k) = (k % 2 == 0) ? std::sin(angle) : std::cos(angle);
  }
  return pe;
}

ReviBranchNet::ReviBranchNet(const NetworkConfig& config) : config_(config) {
  const int d = config.d;
  if (d <= 0 || config.decoder_blocks < 0 || config.heads <= 0 || d % config.heads != 0 ||
      config.max_actions <= 0) {
    throw std::invalid_argument("invalid network configuration");
  }
  Rng rng(mix_seed(config.seed, 0x4e4554));
  add_linear(params_, "gcn.cons_in", kNumConstraintFeatures, d, rng);
  add_linear(params_, "gcn.var_in", kNumVariableFeatures, d, rng);
  for (const char* pass : {"gcn.v2c", "gcn.c2v"}) {
    const std::string prefix = pass;
    params_.add(prefix + ".self", d, d, Init::kGlorot, rng);
    params_.add(prefix + ".msg", d, d, Init::kGlorot, rng);
    params_.add(prefix + ".edge", 1, d, Init::kGlorot, rng);
    params_.add(prefix + ".b", 1, d, Init::kZeros, rng);
  }
  params_.add("act.table", config.max_actions, d, Init::kNormal, rng);
  params_.add("act.start", 1, d, Init::kNormal, rng);
  add_mlp2(params_, "step.score", d, d, 1, rng);
  add_mlp2(params_, "step.comb", 3 * d, d, d, rng);
  add_mlp2(params_, "step.fuse", 2 * d, d, d, rng);
  for (int b = 0; b < config.decoder_blocks; ++b) {
    add_attention(params_, block_name(b, "self"), d, true, rng);
    add_attention(params_, block_name(b, "cross"), d, true, rng);
    add_mlp2(params_, block_name(b, "ffn"), d, 2 * d, d, rng);
  }
  add_linear(params_, "agg", d, 1, rng);
  add_attention(params_, "e1", d, false, rng);
  add_attention(params_, "e2", d, false, rng);
  add_attention(params_, "e3", d, false, rng);
  add_mlp2(params_, "fusion", 3 * d, d, d, rng);
  params_.add("alpha", 1, 1, Init::kConstant, rng, 0.1);
  add_mlp2(params_, "qhead", d, d, 1, rng);
}

Tensor ReviBranchNet::linear(const Tensor& x, const std::string& prefix) const {
  return add_row(matmul(x, p(prefix + ".w")), p(prefix + ".b"));
}

Tensor ReviBranchNet::mlp2(const Tensor& x, const std::string& prefix) const {
  return linear(relu(linear(x, prefix + "1")), prefix + "2");
}

Tensor ReviBranchNet::attention(const Tensor& queries, const Tensor& keys_values,
                                const std::string& prefix, bool output_projection,
                                std::span<const uint8_t> keep,
                                std::vector<Tensor>* weights) const {
  const Tensor q = matmul(queries, p(prefix + ".q"));
  const Tensor k = matmul(keys_values, p(prefix + ".k"));
  const Tensor v = matmul(keys_values, p(prefix + ".v"));
  Tensor out;
  if (config_.heads == 1) {
    Tensor w;
    out = scaled_dot_attention(q, k, v, keep, &w);
    if (weights) weights->push_back(w);
  } else {
    const int width = config_.d / config_.heads;
    std::vector<Tensor> heads;
    for (int h = 0; h < config_.heads; ++h) {
      Tensor w;
      heads.push_back(scaled_dot_attention(slice_cols(q, h * width, width),
                                           slice_cols(k, h * width, width),
                                           slice_cols(v, h * width, width), keep, &w));
      if (weights) weights->push_back(w);
    }
    out = concat_cols(heads);
  }
  if (output_projection) out = matmul(out, p(prefix + ".o"));
  return out;
}

Tensor ReviBranchNet::half_pass(const Tensor& target, const Tensor& source,
                                std::span<const int> source_index,
                                std::span<const int> target_index,
                                const Tensor& coefficients, int target_count,
                                const std::string& prefix) const {
  const Tensor messages =
      add(gather_rows(matmul(source, p(prefix + ".msg")), source_index),
          matmul(coefficients, p(prefix + ".edge")));
  const Tensor aggregated = scatter_add_rows(messages, target_index, target_count);
  const Tensor pre =
      add_row(add(matmul(target, p(prefix + ".self")), aggregated), p(prefix + ".b"));
  return relu(layer_norm_rows(pre));
}

Tensor ReviBranchNet::gcn_encode(const BipartiteGraph& graph) const {
  if (graph.num_variables <= 0) {
    throw std::invalid_argument("gcn_encode: graph has no variables");
  }
  graph.validate();
  const Tensor xc = matrix_from(graph.constraint_features, graph.num_constraints,
                                kNumConstraintFeatures);
  const Tensor xv =
      matrix_from(graph.variable_features, graph.num_variables, kNumVariableFeatures);
  const Tensor coef = matrix_from(graph.edge_coefficient, graph.num_edges(), 1);
  const Tensor hc = relu(linear(xc, "gcn.cons_in"));
  const Tensor hv = relu(linear(xv, "gcn.var_in"));
  const Tensor c1 = half_pass(hc, hv, graph.edge_variable, graph.edge_constraint, coef,
                              graph.num_constraints, "gcn.v2c");
  return half_pass(hv, c1, graph.edge_constraint, graph.edge_variable, coef,
                   graph.num_variables, "gcn.c2v");
}

Tensor ReviBranchNet::start_token() const { return p("act.start"); }

Tensor ReviBranchNet::encode_actions(std::span<const int> actions,
                                     int first_position) const {
  if (actions.empty()) return start_token();
  for (int a : actions) {
    if (a < 0 || a >= config_.max_actions) {
      throw std::out_of_range("action index " + std::to_string(a) +
                              " outside embedding table of size " +
                              std::to_string(config_.max_actions));
    }
  }
  Matrix pe(static_cast<Eigen::Index>(actions.size()), config_.d);
  for (size_t i = 0; i < actions.size(); ++i) {
    pe.row(static_cast<Eigen::Index>(i)) =
        positional_encoding(first_position + static_cast<int>(i), config_.d);
  }
  return layer_norm_rows(
      add(gather_rows(p("act.table"), actions), Tensor::constant(std::move(pe))));
}

Tensor ReviBranchNet::step_builder(const Tensor& v, const Tensor& action_embedding,
                                   StepTrace* trace) const {
  if (v.rows() == 0) throw std::invalid_argument("step_builder: no variable rows");
  if (v.cols() != config_.d || action_embedding.rows() != 1 ||
      action_embedding.cols() != config_.d) {
    throw ShapeError("step_builder: got V " + v.shape_string() + " and action " +
                     action_embedding.shape_string());
  }
  const Tensor v_mean = mean_rows(v);
  const Tensor v_max = max_rows(v);
  const Tensor weights = softmax_rows(transpose(mlp2(v, "step.score")));
  const Tensor v_att = matmul(weights, v);
  const Tensor v_combined = mlp2(concat_cols({v_mean, v_max, v_att}), "step.comb");
  if (trace) *trace = {v_mean, v_max, v_att, weights, v_combined};
  return mlp2(concat_cols({v_combined, action_embedding}), "step.fuse");
}

Tensor ReviBranchNet::step_representation(const BipartiteGraph& graph, int action,
                                          int position) const {
  const int actions[1] = {action};
  return step_builder(gcn_encode(graph), encode_actions(actions, position));
}

DecodeResult ReviBranchNet::decode(const Tensor& r_traj, const Tensor& v,
                                   DecodeTrace* trace) const {
  if (r_traj.cols() != config_.d || v.cols() != config_.d) {
    throw ShapeError("decode: trajectory " + r_traj.shape_string() + " and memory " +
                     v.shape_string() + " must both have d=" + std::to_string(config_.d) +
                     " columns");
  }
  if (r_traj.rows() == 0) throw ShapeError("decode: empty trajectory");
  const Mask causal = causal_mask(r_traj.rows());
  Tensor x = r_traj;
  for (int b = 0; b < config_.decoder_blocks; ++b) {
    const Tensor sa = attention(x, x, block_name(b, "self"), true, causal,
                                trace ? &trace->self_weights : nullptr);
    x = layer_norm_rows(add(x, sa));
    const Tensor ca = attention(x, v, block_name(b, "cross"), true, {},
                                trace ? &trace->cross_weights : nullptr);
    x = layer_norm_rows(add(x, ca));
    x = layer_norm_rows(add(x, mlp2(x, block_name(b, "ffn"))));
  }
  const Tensor weights = softmax_rows(transpose(linear(x, "agg")));
  if (trace) trace->aggregation_weights = weights;
  return {x, matmul(weights, x)};
}

Tensor ReviBranchNet::fuse(const Tensor& r_unified, const Tensor& r_traj, const Tensor& v,
                           FusionTrace* trace) const {
  std::vector<Tensor>* weights = trace ? &trace->weights : nullptr;
  const Tensor e1 = attention(r_unified, v, "e1", false, {}, weights);
  const Tensor e2 = attention(v, r_unified, "e2", false, {}, weights);
  const Tensor e3 = attention(v, r_traj, "e3", false, {}, weights);
  const Tensor fusion =
      mlp2(concat_cols({broadcast_rows(e1, v.rows()), e2, e3}), "fusion");
  if (trace) {
    trace->e1 = e1;
    trace->e2 = e2;
    trace->e3 = e3;
    trace->fusion = fusion;
  }
  return add(v, scale_by(fusion, p("alpha")));
}

Tensor ReviBranchNet::q_head(const Tensor& v_enhanced) const {
  return mlp2(v_enhanced, "qhead");
}

Tensor ReviBranchNet::q_values(const Tensor& v, const Tensor& r_traj,
                               bool use_decoder) const {
  if (!use_decoder) return q_head(v);
  const DecodeResult decoded = decode(r_traj, v);
  return q_head(fuse(decoded.r_unified, r_traj, v));
}

Tensor ReviBranchNet::q_values(const BipartiteGraph& graph, const Tensor& r_traj,
                               bool use_decoder) const {
  return q_values(gcn_encode(graph), r_traj, use_decoder);
}

std::vector<double> masked_q(const Tensor& q, std::span<const uint8_t> candidate_mask) {
  if (q.cols() != 1 || static_cast<size_t>(q.rows()) != candidate_mask.size()) {
    throw ShapeError("masked_q: Q " + q.shape_string() + " with mask of size " +
                     std::to_string(candidate_mask.size()));
  }
  std::vector<double> out(candidate_mask.size(), -std::numeric_limits<double>::infinity());
  for (size_t j = 0; j < candidate_mask.size(); ++j) {
    if (candidate_mask[j]) out[j] = q.value()(static_cast<Eigen::Index>(j), 0);
  }
  return out;
}

int greedy_action(const Tensor& q, std::span<const uint8_t> candidate_mask) {
  const std::vector<double> values = masked_q(q, candidate_mask);
  int best = -1;
  for (size_t j = 0; j < values.size(); ++j) {
    if (!candidate_mask[j]) continue;
    if (best < 0 || values[j] > values[best]) best = static_cast<int>(j);
  }
  if (best < 0) throw std::invalid_argument("greedy_action: no candidate in mask");
  return best;
}

void save_network(const ReviBranchNet& net, std::ostream& out) {
  out.write(kNetMagic, sizeof(kNetMagic));
  write_pod<uint32_t>(out, kNetVersion);
  const NetworkConfig& c = net.config();
  write_pod<int32_t>(out, c.d);
  write_pod<int32_t>(out, c.decoder_blocks);
  write_pod<int32_t>(out, c.heads);
  write_pod<int32_t>(out, c.max_actions);
  write_pod<uint64_t>(out, c.seed);
  net.params().save(out);
}

ReviBranchNet load_network(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kNetMagic, sizeof(kNetMagic)) != 0) {
    throw CheckpointError("not a network checkpoint (bad magic)");
  }
  if (read_pod<uint32_t>(in) != kNetVersion) {
    throw CheckpointError("unsupported network checkpoint version");
  }
  NetworkConfig c;
  c.d = read_pod<int32_t>(in);
  c.decoder_blocks = read_pod<int32_t>(in);
  c.heads = read_pod<int32_t>(in);
  c.max_actions = read_pod<int32_t>(in);
  c.seed = read_pod<uint64_t>(in);
  ReviBranchNet net(c);
  ParameterStore loaded;
  loaded.load(in);
  if (loaded.names() != net.params().names()) {
    throw CheckpointError("checkpoint parameters do not match the network layout");
  }
  net.params() = std::move(loaded);
  return net;
}

void save_network(const ReviBranchNet& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  save_network(net, out);
  if (!out) throw CheckpointError("failed writing '" + path.string() + "'");
}

ReviBranchNet load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint '" + path.string() + "' not found");
  return load_network(in);
}

}  // namespace revibranch
