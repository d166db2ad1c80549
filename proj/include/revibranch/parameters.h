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

// Named learnable tensors plus Adam state.
//
// Checkpoint layout (little-endian):
//   "RVBRPARM" magic, u32 version (1), u64 parameter count
//   per parameter: u32 name length, name bytes, u32 rows, u32 cols,
//                  rows*cols f64 values (row-major)
//   u64 adam step count, u8 moments-present flag
//   if present, per parameter: rows*cols f64 first moments, then second.

#ifndef REVIBRANCH_PARAMETERS_H_
#define REVIBRANCH_PARAMETERS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "revibranch/random.h"
#include "revibranch/tensor.h"

namespace revibranch {

enum class Init { kGlorot, kZeros, kNormal, kConstant };

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double max_grad_norm = 0.0;  // global-norm clipping; 0 disables
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterStore {
 public:
  ParameterStore() = default;
  // Tensors share storage, so copies would alias; use copy_values_from.
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

  // kNormal draws N(0, 0.02); kConstant fills with `constant`.
  Tensor& add(const std::string& name, int rows, int cols, Init init, Rng& rng,
              double constant = 0.0);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }
  size_t size() const { return params_.size(); }
  int64_t num_scalars() const;

  void zero_grad();
  double grad_norm() const;

  void adam_step(const AdamConfig& config);
  int64_t adam_steps() const { return adam_step_; }

  // Copies every value bitwise; names and shapes must match.
  void copy_values_from(const ParameterStore& other);
  bool values_equal(const ParameterStore& other) const;
  // Values and optimizer state.
  bool state_equal(const ParameterStore& other) const;

  void save(std::ostream& out) const;
  // Replaces the contents of this store.
  void load(std::istream& in);
  void save(const std::filesystem::path& path) const;
  void load(const std::filesystem::path& path);

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> params_;
  std::map<std::string, size_t> index_;
  std::vector<Matrix> first_moment_;
  std::vector<Matrix> second_moment_;
  int64_t adam_step_ = 0;
};

}  // namespace revibranch

#endif  // REVIBRANCH_PARAMETERS_H_
