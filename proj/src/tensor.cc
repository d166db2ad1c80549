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

#include "revibranch/tensor.h"

#include <cmath>
#include <unordered_set>

namespace revibranch {

namespace {

thread_local bool g_grad_enabled = true;

using NodePtr = std::shared_ptr<TensorNode>;

std::string shape_of(const Matrix& m) {
  return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_string() +
                   " and " + b.shape_string());
}

void require_defined(const char* op, const Tensor& a) {
  if (!a.defined()) throw std::invalid_argument(std::string(op) + ": undefined tensor");
}

const Matrix& pv(const TensorNode& n, int i) { return n.parents[i]->value; }
TensorNode& parent(TensorNode& n, int i) { return *n.parents[i]; }

void check_mask(const char* op, const Tensor& a, std::span<const uint8_t> keep) {
  if (!keep.empty() && keep.size() != static_cast<size_t>(a.rows()) * a.cols()) {
    throw ShapeError(std::string(op) + ": mask of size " + std::to_string(keep.size()) +
                     " for shape " + a.shape_string());
  }
}

}  // namespace

void TensorNode::accumulate(const Matrix& g) {
  if (!requires_grad) return;
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

Tensor Tensor::constant(Matrix value) {
  auto node = std::make_shared<TensorNode>();
  node->value = std::move(value);
  if (!node->value.allFinite()) throw NonFiniteError("constant");
  return Tensor(std::move(node));
}

Tensor Tensor::parameter(Matrix value) {
  Tensor t = constant(std::move(value));
  t.node_->requires_grad = true;
  t.node_->op = "parameter";
  return t;
}

Tensor Tensor::zeros(int rows, int cols) { return constant(Matrix::Zero(rows, cols)); }

Tensor Tensor::row(std::span<const double> values) {
  Matrix m(1, static_cast<Eigen::Index>(values.size()));
  for (size_t k = 0; k < values.size(); ++k) m(0, static_cast<Eigen::Index>(k)) = values[k];
  return constant(std::move(m));
}

std::string Tensor::shape_string() const {
  return defined() ? shape_of(node_->value) : "(undefined)";
}

Matrix Tensor::grad() const {
  if (node_->grad.size() == 0) return Matrix::Zero(rows(), cols());
  return node_->grad;
}

double Tensor::item() const {
  if (rows() != 1 || cols() != 1) {
    throw ShapeError("item: expected (1x1), got " + shape_string());
  }
  return node_->value(0, 0);
}

Tensor Tensor::make(Matrix value, const char* op, std::vector<NodePtr> parents,
                    std::function<void(TensorNode&)> backward_fn) {
  if (!value.allFinite()) throw NonFiniteError(op);
  auto node = std::make_shared<TensorNode>();
  node->value = std::move(value);
  node->op = op;
  if (g_grad_enabled) {
    bool any = false;
    for (const NodePtr& p : parents) any |= p->requires_grad;
    if (any) {
      node->requires_grad = true;
      node->parents = std::move(parents);
      node->backward_fn = std::move(backward_fn);
    }
  }
  return Tensor(std::move(node));
}

void Tensor::backward() const {
  if (rows() != 1 || cols() != 1) {
    throw ShapeError("backward: loss must be (1x1), got " + shape_string());
  }
  if (!node_->requires_grad) return;
  // Iterative post-order DFS gives a topological order.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> visited;
  std::vector<std::pair<TensorNode*, size_t>> stack = {{node_.get(), 0}};
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      TensorNode* p = n->parents[next++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.push_back({p, 0});
      }
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  node_->accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* n = *it;
    if (n->backward_fn && n->grad.size() != 0) n->backward_fn(*n);
  }
  // Intermediate gradients are not needed once propagated.
  for (TensorNode* n : order) {
    if (n->backward_fn) n->grad.resize(0, 0);
  }
}

Mask causal_mask(int size) {
  Mask keep(static_cast<size_t>(size) * size, 0);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j <= i; ++j) keep[i * size + j] = 1;
  }
  return keep;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined("matmul", a);
  require_defined("matmul", b);
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  Matrix out = a.value() * b.value();
  return Tensor::make(std::move(out), "matmul", {a.shared(), b.shared()},
                      [](TensorNode& n) {
                        parent(n, 0).accumulate(n.grad * pv(n, 1).transpose());
                        parent(n, 1).accumulate(pv(n, 0).transpose() * n.grad);
                      });
}

Tensor transpose(const Tensor& a) {
  require_defined("transpose", a);
  Matrix out = a.value().transpose();
  return Tensor::make(std::move(out), "transpose", {a.shared()}, [](TensorNode& n) {
    parent(n, 0).accumulate(n.grad.transpose());
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error("add", a, b);
  Matrix out = a.value() + b.value();
  return Tensor::make(std::move(out), "add", {a.shared(), b.shared()}, [](TensorNode& n) {
    parent(n, 0).accumulate(n.grad);
    parent(n, 1).accumulate(n.grad);
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error("sub", a, b);
  Matrix out = a.value() - b.value();
  return Tensor::make(std::move(out), "sub", {a.shared(), b.shared()}, [](TensorNode& n) {
    parent(n, 0).accumulate(n.grad);
    parent(n, 1).accumulate(-n.grad);
  });
}

Tensor add_row(const Tensor& a, const Tensor& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) shape_error("add_row", a, row);
  Matrix out = a.value().rowwise() + row.value().row(0);
  return Tensor::make(std::move(out), "add_row", {a.shared(), row.shared()},
                      [](TensorNode& n) {
                        parent(n, 0).accumulate(n.grad);
                        parent(n, 1).accumulate(n.grad.colwise().sum());
                      });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error("mul", a, b);
  Matrix out = a.value().cwiseProduct(b.value());
  return Tensor::make(std::move(out), "mul", {a.shared(), b.shared()}, [](TensorNode& n) {
    parent(n, 0).accumulate(n.grad.cwiseProduct(pv(n, 1)));
    parent(n, 1).accumulate(n.grad.cwiseProduct(pv(n, 0)));
  });
}

Tensor scale(const Tensor& a, double factor) {
  Matrix out = a.value() * factor;
  return Tensor::make(std::move(out), "scale", {a.shared()}, [factor](TensorNode& n) {
    parent(n, 0).accumulate(n.grad * factor);
  });
}

Tensor scale_by(const Tensor& a, const Tensor& scalar) {
  if (scalar.rows() != 1 || scalar.cols() != 1) shape_error("scale_by", a, scalar);
  Matrix out = a.value() * scalar.value()(0, 0);
  return Tensor::make(std::move(out), "scale_by", {a.shared(), scalar.shared()},
                      [](TensorNode& n) {
                        parent(n, 0).accumulate(n.grad * pv(n, 1)(0, 0));
                        Matrix g(1, 1);
                        g(0, 0) = n.grad.cwiseProduct(pv(n, 0)).sum();
                        parent(n, 1).accumulate(g);
                      });
}

Tensor relu(const Tensor& a) {
  Matrix out = a.value().cwiseMax(0.0);
  return Tensor::make(std::move(out), "relu", {a.shared()}, [](TensorNode& n) {
    const Matrix& x = pv(n, 0);
    Matrix g = n.grad;
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      if (!(x.data()[k] > 0.0)) g.data()[k] = 0.0;
    }
    parent(n, 0).accumulate(g);
  });
}

Tensor square(const Tensor& a) {
  Matrix out = a.value().cwiseProduct(a.value());
  return Tensor::make(std::move(out), "square", {a.shared()}, [](TensorNode& n) {
    parent(n, 0).accumulate(2.0 * n.grad.cwiseProduct(pv(n, 0)));
  });
}

Tensor softmax_rows(const Tensor& a, std::span<const uint8_t> keep) {
  check_mask("softmax_rows", a, keep);
  const Matrix& x = a.value();
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (keep.empty() || keep[i * x.cols() + j]) top = std::max(top, x(i, j));
    }
    if (top == -std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("softmax_rows: row " + std::to_string(i) +
                                  " has every entry masked");
    }
    double total = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (keep.empty() || keep[i * x.cols() + j]) {
        out(i, j) = std::exp(x(i, j) - top);
        total += out(i, j);
      }
    }
    out.row(i) /= total;
  }
  return Tensor::make(std::move(out), "softmax_rows", {a.shared()}, [](TensorNode& n) {
    const Matrix& y = n.value;
    Matrix g = y.cwiseProduct(n.grad);
    const Eigen::VectorXd dots = g.rowwise().sum();
    g -= y.cwiseProduct(dots.replicate(1, y.cols()));
    parent(n, 0).accumulate(g);
  });
}

Tensor layer_norm_rows(const Tensor& a, double eps) {
  const Matrix& x = a.value();
  const Eigen::Index c = x.cols();
  Matrix out(x.rows(), c);
  Eigen::VectorXd inv_sigma(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double mu = x.row(i).mean();
    const double var = (x.row(i).array() - mu).square().mean();
    inv_sigma(i) = 1.0 / std::sqrt(var + eps);
    out.row(i) = (x.row(i).array() - mu) * inv_sigma(i);
  }
  return Tensor::make(std::move(out), "layer_norm_rows", {a.shared()},
                      [inv_sigma](TensorNode& n) {
                        const Matrix& xhat = n.value;
                        Matrix g(xhat.rows(), xhat.cols());
                        for (Eigen::Index i = 0; i < xhat.rows(); ++i) {
                          const double gm = n.grad.row(i).mean();
                          const double gx = n.grad.row(i).dot(xhat.row(i)) /
                                            static_cast<double>(xhat.cols());
                          g.row(i) = inv_sigma(i) * (n.grad.row(i).array() - gm -
                                                     xhat.row(i).array() * gx);
                        }
                        parent(n, 0).accumulate(g);
                      });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  const int rows = parts[0].rows();
  int cols = 0;
  std::vector<NodePtr> parents;
  std::vector<int> offsets;
  for (const Tensor& p : parts) {
    if (p.rows() != rows) shape_error("concat_cols", parts[0], p);
    offsets.push_back(cols);
    cols += p.cols();
    parents.push_back(p.shared());
  }
  Matrix out(rows, cols);
  for (size_t k = 0; k < parts.size(); ++k) {
    out.middleCols(offsets[k], parts[k].cols()) = parts[k].value();
  }
  return Tensor::make(std::move(out), "concat_cols", std::move(parents),
                      [offsets](TensorNode& n) {
                        for (size_t k = 0; k < n.parents.size(); ++k) {
                          const Eigen::Index w = n.parents[k]->value.cols();
                          n.parents[k]->accumulate(n.grad.middleCols(offsets[k], w));
                        }
                      });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
  const int cols = parts[0].cols();
  int rows = 0;
  std::vector<NodePtr> parents;
  std::vector<int> offsets;
  for (const Tensor& p : parts) {
    if (p.cols() != cols) shape_error("concat_rows", parts[0], p);
    offsets.push_back(rows);
    rows += p.rows();
    parents.push_back(p.shared());
  }
  Matrix out(rows, cols);
  for (size_t k = 0; k < parts.size(); ++k) {
    out.middleRows(offsets[k], parts[k].rows()) = parts[k].value();
  }
  return Tensor::make(std::move(out), "concat_rows", std::move(parents),
                      [offsets](TensorNode& n) {
                        for (size_t k = 0; k < n.parents.size(); ++k) {
                          const Eigen::Index h = n.parents[k]->value.rows();
                          n.parents[k]->accumulate(n.grad.middleRows(offsets[k], h));
                        }
                      });
}

Tensor slice_cols(const Tensor& a, int start, int count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw ShapeError("slice_cols: columns [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") out of range for " +
                     a.shape_string());
  }
  Matrix out = a.value().middleCols(start, count);
  return Tensor::make(std::move(out), "slice_cols", {a.shared()},
                      [start, count](TensorNode& n) {
                        Matrix g = Matrix::Zero(pv(n, 0).rows(), pv(n, 0).cols());
                        g.middleCols(start, count) = n.grad;
                        parent(n, 0).accumulate(g);
                      });
}

Tensor mean_rows(const Tensor& a) {
  if (a.rows() == 0) throw ShapeError("mean_rows: empty input " + a.shape_string());
  Matrix out = a.value().colwise().mean();
  return Tensor::make(std::move(out), "mean_rows", {a.shared()}, [](TensorNode& n) {
    const Eigen::Index r = pv(n, 0).rows();
    parent(n, 0).accumulate(n.grad.replicate(r, 1) / static_cast<double>(r));
  });
}

Tensor max_rows(const Tensor& a) {
  if (a.rows() == 0) throw ShapeError("max_rows: empty input " + a.shape_string());
  const Matrix& x = a.value();
  Matrix out(1, x.cols());
  std::vector<int> arg(x.cols(), 0);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 1; i < x.rows(); ++i) {
      if (x(i, j) > x(arg[j], j)) arg[j] = static_cast<int>(i);
    }
    out(0, j) = x(arg[j], j);
  }
  return Tensor::make(std::move(out), "max_rows", {a.shared()}, [arg](TensorNode& n) {
    Matrix g = Matrix::Zero(pv(n, 0).rows(), pv(n, 0).cols());
    for (size_t j = 0; j < arg.size(); ++j) g(arg[j], j) = n.grad(0, j);
    parent(n, 0).accumulate(g);
  });
}

Tensor sum(const Tensor& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return Tensor::make(std::move(out), "sum", {a.shared()}, [](TensorNode& n) {
    parent(n, 0).accumulate(Matrix::Constant(pv(n, 0).rows(), pv(n, 0).cols(), n.grad(0, 0)));
  });
}

Tensor mean(const Tensor& a) {
  if (a.value().size() == 0) throw ShapeError("mean: empty input");
  return scale(sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Tensor element(const Tensor& a, int row, int col) {
  if (row < 0 || row >= a.rows() || col < 0 || col >= a.cols()) {
    throw ShapeError("element: (" + std::to_string(row) + ", " + std::to_string(col) +
                     ") outside " + a.shape_string());
  }
  Matrix out(1, 1);
  out(0, 0) = a.value()(row, col);
  return Tensor::make(std::move(out), "element", {a.shared()}, [row, col](TensorNode& n) {
    Matrix g = Matrix::Zero(pv(n, 0).rows(), pv(n, 0).cols());
    g(row, col) = n.grad(0, 0);
    parent(n, 0).accumulate(g);
  });
}

Tensor gather_rows(const Tensor& a, std::span<const int> index) {
  Matrix out(static_cast<Eigen::Index>(index.size()), a.cols());
  for (size_t k = 0; k < index.size(); ++k) {
    if (index[k] < 0 || index[k] >= a.rows()) {
      throw std::out_of_range("gather_rows: index " + std::to_string(index[k]) +
                              " outside " + a.shape_string());
    }
    out.row(static_cast<Eigen::Index>(k)) = a.value().row(index[k]);
  }
  std::vector<int> idx(index.begin(), index.end());
  return Tensor::make(std::move(out), "gather_rows", {a.shared()}, [idx](TensorNode& n) {
    Matrix g = Matrix::Zero(pv(n, 0).rows(), pv(n, 0).cols());
    for (size_t k = 0; k < idx.size(); ++k) g.row(idx[k]) += n.grad.row(k);
    parent(n, 0).accumulate(g);
  });
}

Tensor scatter_add_rows(const Tensor& a, std::span<const int> index, int out_rows) {
  if (index.size() != static_cast<size_t>(a.rows())) {
    throw ShapeError("scatter_add_rows: " + std::to_string(index.size()) +
                     " indices for " + a.shape_string());
  }
  Matrix out = Matrix::Zero(out_rows, a.cols());
  for (size_t k = 0; k < index.size(); ++k) {
    if (index[k] < 0 || index[k] >= out_rows) {
      throw std::out_of_range("scatter_add_rows: index " + std::to_string(index[k]) +
                              " outside " + std::to_string(out_rows) + " rows");
    }
    out.row(index[k]) += a.value().row(static_cast<Eigen::Index>(k));
  }
  std::vector<int> idx(index.begin(), index.end());
  return Tensor::make(std::move(out), "scatter_add_rows", {a.shared()},
                      [idx](TensorNode& n) {
                        Matrix g(static_cast<Eigen::Index>(idx.size()), n.grad.cols());
                        for (size_t k = 0; k < idx.size(); ++k) g.row(k) = n.grad.row(idx[k]);
                        parent(n, 0).accumulate(g);
                      });
}

Tensor broadcast_rows(const Tensor& row, int count) {
  if (row.rows() != 1) throw ShapeError("broadcast_rows: expected one row, got " + row.shape_string());
  Matrix out = row.value().replicate(count, 1);
  return Tensor::make(std::move(out), "broadcast_rows", {row.shared()}, [](TensorNode& n) {
    parent(n, 0).accumulate(n.grad.colwise().sum());
  });
}

Tensor scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                            std::span<const uint8_t> keep, Tensor* weights) {
  if (q.cols() != k.cols()) shape_error("attention(q, k)", q, k);
  if (k.rows() != v.rows()) shape_error("attention(k, v)", k, v);
  const Tensor scores =
      scale(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(q.cols())));
  const Tensor p = softmax_rows(scores, keep);
  if (weights) *weights = p;
  return matmul(p, v);
}

}  // namespace revibranch
