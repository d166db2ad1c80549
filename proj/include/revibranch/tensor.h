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

// Dense 2-D tensors with tape-based reverse-mode differentiation. Every
// forward op checks its output for NaN/Inf and throws NonFiniteError.

#ifndef REVIBRANCH_TENSOR_H_
#define REVIBRANCH_TENSOR_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace revibranch {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class NonFiniteError : public std::runtime_error {
 public:
  explicit NonFiniteError(const std::string& op)
      : std::runtime_error("non-finite value produced by " + op) {}
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TensorNode {
  Matrix value;
  Matrix grad;  // allocated on first accumulation
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backward_fn;

  void accumulate(const Matrix& g);
};

class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Matrix value);
  static Tensor parameter(Matrix value);
  static Tensor zeros(int rows, int cols);
  static Tensor row(std::span<const double> values);

  bool defined() const { return node_ != nullptr; }
  int rows() const { return static_cast<int>(node_->value.rows()); }
  int cols() const { return static_cast<int>(node_->value.cols()); }
  std::string shape_string() const;
  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  // Zero matrix of the value's shape when nothing was accumulated.
  Matrix grad() const;
  bool has_grad() const { return node_->grad.size() != 0; }
  bool requires_grad() const { return node_->requires_grad; }
  double item() const;

  // Reverse sweep from a 1x1 tensor; gradients add into leaves.
  void backward() const;
  void zero_grad() { node_->grad.resize(0, 0); }

  TensorNode* node() const { return node_.get(); }

  // Internal: wraps an op result and wires the tape.
  static Tensor make(Matrix value, const char* op,
                     std::vector<std::shared_ptr<TensorNode>> parents,
                     std::function<void(TensorNode&)> backward_fn);
  const std::shared_ptr<TensorNode>& shared() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<TensorNode> node_;
};

// Disables taping for inference within its scope.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Row-major keep-mask: 1 keeps an entry, 0 masks it. Empty means keep all.
using Mask = std::vector<uint8_t>;

Mask causal_mask(int size);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
// a (r x c) plus a 1 x c row broadcast over rows.
Tensor add_row(const Tensor& a, const Tensor& row);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
// a times a learned 1x1 scalar.
Tensor scale_by(const Tensor& a, const Tensor& scalar);
Tensor relu(const Tensor& a);
Tensor square(const Tensor& a);
// Row-wise softmax; masked entries get probability exactly 0 and no
// gradient. A row with every entry masked is an error.
Tensor softmax_rows(const Tensor& a, std::span<const uint8_t> keep = {});
// Normalizes each row to zero mean and unit variance (no affine part).
Tensor layer_norm_rows(const Tensor& a, double eps = 1e-8);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& a, int start, int count);
Tensor mean_rows(const Tensor& a);  // 1 x c
Tensor max_rows(const Tensor& a);   // 1 x c, ties to the lowest row
Tensor sum(const Tensor& a);        // 1 x 1
Tensor mean(const Tensor& a);       // 1 x 1
Tensor element(const Tensor& a, int row, int col);  // 1 x 1
Tensor gather_rows(const Tensor& a, std::span<const int> index);
// out[index[k]] += a[k]; out has `out_rows` rows.
Tensor scatter_add_rows(const Tensor& a, std::span<const int> index, int out_rows);
Tensor broadcast_rows(const Tensor& row, int count);

// softmax(Q K^T / sqrt(d_k)) V with an optional keep-mask over the score
// matrix. `weights`, if given, receives the attention matrix.
Tensor scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                            std::span<const uint8_t> keep = {},
                            Tensor* weights = nullptr);

}  // namespace revibranch

#endif  // REVIBRANCH_TENSOR_H_
