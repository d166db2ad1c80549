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

#include "revibranch/parameters.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "revibranch/binary_io.h"

namespace revibranch {

namespace {

constexpr char kMagic[8] = {'R', 'V', 'B', 'R', 'P', 'A', 'R', 'M'};
constexpr uint32_t kVersion = 1;

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.size() == 0 ||
          std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);
}

}  // namespace

Tensor& ParameterStore::add(const std::string& name, int rows, int cols, Init init,
                            Rng& rng, double constant) {
  if (contains(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
  if (rows <= 0 || cols <= 0) {
    throw std::invalid_argument("parameter '" + name + "' needs a positive shape");
  }
  Matrix value(rows, cols);
  switch (init) {
    case Init::kGlorot: {
      const double limit = std::sqrt(6.0 / (rows + cols));
      for (Eigen::Index k = 0; k < value.size(); ++k) {
        value.data()[k] = rng.uniform(-limit, limit);
      }
      break;
    }
    case Init::kZeros:
      value.setZero();
      break;
    case Init::kNormal:
      for (Eigen::Index k = 0; k < value.size(); ++k) {
        value.data()[k] = rng.normal(0.0, 0.02);
      }
      break;
    case Init::kConstant:
      value.setConstant(constant);
      break;
  }
  index_[name] = params_.size();
  names_.push_back(name);
  params_.push_back(Tensor::parameter(std::move(value)));
  first_moment_.emplace_back();
  second_moment_.emplace_back();
  return params_.back();
}

Tensor& ParameterStore::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return params_[it->second];
}

const Tensor& ParameterStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return params_[it->second];
}

int64_t ParameterStore::num_scalars() const {
  int64_t total = 0;
  for (const Tensor& p : params_) total += p.value().size();
  return total;
}

void ParameterStore::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

double ParameterStore::grad_norm() const {
  double total = 0.0;
  for (const Tensor& p : params_) {
    if (p.has_grad()) total += p.node()->grad.squaredNorm();
  }
  return std::sqrt(total);
}

void ParameterStore::adam_step(const AdamConfig& config) {
  ++adam_step_;
  double clip = 1.0;
  if (config.max_grad_norm > 0.0) {
    const double norm = grad_norm();
    if (norm > config.max_grad_norm) clip = config.max_grad_norm / norm;
  }
  const double t = static_cast<double>(adam_step_);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (size_t k = 0; k < params_.size(); ++k) {
    Matrix& value = params_[k].mutable_value();
    if (first_moment_[k].size() == 0) {
      first_moment_[k] = Matrix::Zero(value.rows(), value.cols());
      second_moment_[k] = Matrix::Zero(value.rows(), value.cols());
    }
    const Matrix g = params_[k].grad() * clip;
    first_moment_[k] = config.beta1 * first_moment_[k] + (1.0 - config.beta1) * g;
    second_moment_[k] =
        config.beta2 * second_moment_[k] + (1.0 - config.beta2) * g.cwiseProduct(g);
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      const double m_hat = first_moment_[k].data()[i] / c1;
      const double v_hat = second_moment_[k].data()[i] / c2;
      value.data()[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
    if (!value.allFinite()) throw NonFiniteError("adam_step(" + names_[k] + ")");
  }
}

void ParameterStore::copy_values_from(const ParameterStore& other) {
  if (other.names_ != names_) throw std::invalid_argument("parameter sets differ");
  for (size_t k = 0; k < params_.size(); ++k) {
    const Matrix& src = other.params_[k].value();
    Matrix& dst = params_[k].mutable_value();
    if (src.rows() != dst.rows() || src.cols() != dst.cols()) {
      throw ShapeError("parameter '" + names_[k] + "' shape differs");
    }
    dst = src;
  }
}

bool ParameterStore::values_equal(const ParameterStore& other) const {
  if (other.names_ != names_) return false;
  for (size_t k = 0; k < params_.size(); ++k) {
    if (!bitwise_equal(params_[k].value(), other.params_[k].value())) return false;
  }
  return true;
}

bool ParameterStore::state_equal(const ParameterStore& other) const {
  if (!values_equal(other) || adam_step_ != other.adam_step_) return false;
  for (size_t k = 0; k < params_.size(); ++k) {
    if (!bitwise_equal(first_moment_[k], other.first_moment_[k]) ||
        !bitwise_equal(second_moment_[k], other.second_moment_[k])) {
      return false;
    }
  }
  return true;
}

void ParameterStore::save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  write_pod<uint32_t>(out, kVersion);
  write_pod<uint64_t>(out, params_.size());
  for (size_t k = 0; k < params_.size(); ++k) {
    write_string(out, names_[k]);
    const Matrix& v = params_[k].value();
    write_pod<uint32_t>(out, static_cast<uint32_t>(v.rows()));
    write_pod<uint32_t>(out, static_cast<uint32_t>(v.cols()));
    write_doubles(out, v.data(), v.size());
  }
  write_pod<uint64_t>(out, static_cast<uint64_t>(adam_step_));
  const bool moments = !first_moment_.empty() && first_moment_[0].size() != 0;
  write_pod<uint8_t>(out, moments ? 1 : 0);
  if (moments) {
    for (size_t k = 0; k < params_.size(); ++k) {
      write_doubles(out, first_moment_[k].data(), first_moment_[k].size());
      write_doubles(out, second_moment_[k].data(), second_moment_[k].size());
    }
  }
  if (!out) throw CheckpointError("failed writing parameter checkpoint");
}

void ParameterStore::load(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a parameter checkpoint (bad magic)");
  }
  if (read_pod<uint32_t>(in) != kVersion) {
    throw CheckpointError("unsupported parameter checkpoint version");
  }
  ParameterStore loaded;
  const uint64_t count = read_pod<uint64_t>(in);
  for (uint64_t k = 0; k < count; ++k) {
    const std::string name = read_string(in);
    const uint32_t rows = read_pod<uint32_t>(in);
    const uint32_t cols = read_pod<uint32_t>(in);
    Matrix value(rows, cols);
    read_doubles(in, value.data(), value.size());
    if (loaded.contains(name)) throw CheckpointError("duplicate parameter '" + name + "'");
    loaded.index_[name] = loaded.params_.size();
    loaded.names_.push_back(name);
    loaded.params_.push_back(Tensor::parameter(std::move(value)));
    loaded.first_moment_.emplace_back();
    loaded.second_moment_.emplace_back();
  }
  loaded.adam_step_ = static_cast<int64_t>(read_pod<uint64_t>(in));
  if (read_pod<uint8_t>(in)) {
    for (size_t k = 0; k < loaded.params_.size(); ++k) {
      const Matrix& v = loaded.params_[k].value();
      loaded.first_moment_[k].resize(v.rows(), v.cols());
      loaded.second_moment_[k].resize(v.rows(), v.cols());
      read_doubles(in, loaded.first_moment_[k].data(), v.size());
      read_doubles(in, loaded.second_moment_[k].data(), v.size());
    }
  }
  *this = std::move(loaded);
}

void ParameterStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  save(out);
}

void ParameterStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
  load(in);
}

}  // namespace revibranch
