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

#include <cmath>
#include <cstring>
#include <sstream>

#include <gtest/gtest.h>

#include "gradcheck.h"
#include "revibranch/parameters.h"
#include "revibranch/tensor.h"

namespace revibranch {
namespace {

using testing::gradcheck;
using testing::probe_loss;
using testing::random_matrix;

constexpr double kTol = 1e-4;

struct OpCase {
  const char* name;
  // Builds the op output from two random inputs shaped by the case.
  std::function<Tensor(const Tensor&, const Tensor&)> op;
  int ar, ac, br, bc;
};

std::vector<OpCase> op_cases() {
  static const std::vector<int> idx = {2, 0, 2, 1};
  static const Mask keep = {1, 0, 1, 1, 1, 1, 0, 1, 1, 1, 1, 0};  // 3 x 4
  return {
      {"matmul", [](auto& a, auto& b) { return matmul(a, b); }, 3, 4, 4, 2},
      {"transpose", [](auto& a, auto&) { return transpose(a); }, 3, 4, 1, 1},
      {"add", [](auto& a, auto& b) { return add(a, b); }, 3, 4, 3, 4},
      {"sub", [](auto& a, auto& b) { return sub(a, b); }, 3, 4, 3, 4},
      {"add_row", [](auto& a, auto& b) { return add_row(a, b); }, 3, 4, 1, 4},
      {"mul", [](auto& a, auto& b) { return mul(a, b); }, 3, 4, 3, 4},
      {"scale", [](auto& a, auto&) { return scale(a, -1.7); }, 3, 4, 1, 1},
      {"scale_by", [](auto& a, auto& b) { return scale_by(a, b); }, 3, 4, 1, 1},
      {"relu", [](auto& a, auto&) { return relu(a); }, 3, 4, 1, 1},
      {"square", [](auto& a, auto&) { return square(a); }, 3, 4, 1, 1},
      {"softmax", [](auto& a, auto&) { return softmax_rows(a); }, 3, 4, 1, 1},
      {"masked_softmax", [](auto& a, auto&) { return softmax_rows(a, keep); }, 3, 4, 1, 1},
      {"layer_norm", [](auto& a, auto&) { return layer_norm_rows(a); }, 3, 4, 1, 1},
      {"concat_cols", [](auto& a, auto& b) { return concat_cols({a, b, a}); }, 3, 4, 3, 2},
      {"concat_rows", [](auto& a, auto& b) { return concat_rows({b, a}); }, 3, 4, 2, 4},
      {"slice_cols", [](auto& a, auto&) { return slice_cols(a, 1, 2); }, 3, 4, 1, 1},
      {"mean_rows", [](auto& a, auto&) { return mean_rows(a); }, 3, 4, 1, 1},
      {"max_rows", [](auto& a, auto&) { return max_rows(a); }, 3, 4, 1, 1},
      {"sum", [](auto& a, auto&) { return sum(a); }, 3, 4, 1, 1},
      {"mean", [](auto& a, auto&) { return mean(a); }, 3, 4, 1, 1},
      {"element", [](auto& a, auto&) { return element(a, 2, 1); }, 3, 4, 1, 1},
      {"gather_rows", [](auto& a, auto&) { return gather_rows(a, idx); }, 3, 4, 1, 1},
      {"scatter_add", [](auto& a, auto&) { return scatter_add_rows(a, idx, 5); }, 4, 3, 1, 1},
      {"broadcast_rows", [](auto&, auto& b) { return broadcast_rows(b, 3); }, 1, 1, 1, 4},
      {"attention",
       [](auto& a, auto& b) { return scaled_dot_attention(a, b, mul(b, b)); }, 3, 4, 5, 4},
      {"masked_attention",
       [](auto& a, auto& b) {
         return scaled_dot_attention(a, b, b, Mask{1, 0, 1, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1, 1, 1});
       },
       3, 4, 5, 4},
  };
}

class OpGradientTest : public ::testing::TestWithParam<int> {};

TEST_P(OpGradientTest, MatchesFiniteDifferencesOverSeeds) {
  const OpCase c = op_cases()[GetParam()];
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(mix_seed(seed, GetParam()));
    Tensor a = Tensor::parameter(random_matrix(c.ar, c.ac, rng));
    Tensor b = Tensor::parameter(random_matrix(c.br, c.bc, rng));
    const Tensor out = c.op(a, b);
    const Matrix r = random_matrix(out.rows(), out.cols(), rng);
    const double err = gradcheck([&] { return probe_loss(c.op(a, b), r); }, {a, b});
    EXPECT_LE(err, kTol) << c.name << " seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(AllOps, OpGradientTest,
                         ::testing::Range(0, static_cast<int>(op_cases().size())),
                         [](const auto& info) { return std::string(op_cases()[info.param].name); });

TEST(TensorTest, SoftmaxOfZerosIsUniform) {
  const Tensor s = softmax_rows(Tensor::zeros(1, 3));
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(s.value()(0, j), 1.0 / 3.0, 1e-15);
}

TEST(TensorTest, MaskedSoftmaxGivesExactZeros) {
  Tensor a = Tensor::parameter(Matrix{{1.0, 2.0, 3.0}, {0.5, -1.0, 4.0}});
  const Mask keep = {1, 0, 1, 0, 1, 1};
  const Tensor s = softmax_rows(a, keep);
  EXPECT_EQ(s.value()(0, 1), 0.0);
  EXPECT_EQ(s.value()(1, 0), 0.0);
  EXPECT_NEAR(s.value().row(0).sum(), 1.0, 1e-12);
  sum(mul(s, Tensor::constant(Matrix{{1, 2, 3}, {4, 5, 6}}))).backward();
  EXPECT_EQ(a.grad()(0, 1), 0.0);
  EXPECT_EQ(a.grad()(1, 0), 0.0);
  EXPECT_NE(a.grad()(0, 0), 0.0);
}

TEST(TensorTest, FullyMaskedRowThrows) {
  const Mask keep = {0, 0};
  EXPECT_THROW(softmax_rows(Tensor::zeros(1, 2), keep), std::invalid_argument);
}

TEST(TensorTest, LayerNormRowsAreStandardized) {
  Rng rng(3);
  const Tensor y = layer_norm_rows(Tensor::constant(random_matrix(5, 8, rng, 10.0)));
  for (int i = 0; i < 5; ++i) {
    const double mu = y.value().row(i).mean();
    const double var = (y.value().row(i).array() - mu).square().mean();
    EXPECT_LT(std::abs(mu), 1e-8);
    EXPECT_NEAR(var, 1.0, 1e-6);
  }
}

TEST(TensorTest, SingleKeyAttentionReturnsValueRow) {
  Rng rng(4);
  const Tensor q = Tensor::constant(random_matrix(3, 4, rng));
  const Tensor k = Tensor::constant(random_matrix(2, 4, rng));
  const Tensor v = Tensor::constant(random_matrix(2, 4, rng));
  const Mask keep = {0, 1, 0, 1, 0, 1};
  Tensor w;
  const Tensor out = scaled_dot_attention(q, k, v, keep, &w);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(w.value()(i, 1), 1.0);
    for (int j = 0; j < 4; ++j) EXPECT_EQ(out.value()(i, j), v.value()(1, j));
  }
}

TEST(TensorTest, AttentionRowsSumToOne) {
  Rng rng(5);
  Tensor w;
  scaled_dot_attention(Tensor::constant(random_matrix(6, 4, rng, 5.0)),
                       Tensor::constant(random_matrix(7, 4, rng, 5.0)),
                       Tensor::constant(random_matrix(7, 4, rng)), {}, &w);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(w.value().row(i).sum(), 1.0, 1e-8);
}

TEST(TensorTest, LinearMapGradientIsOuterProduct) {
  Tensor w = Tensor::parameter(Matrix{{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  const Tensor x = Tensor::constant(Matrix{{0.5, -1.0, 2.0}});
  sum(matmul(x, w)).backward();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) EXPECT_EQ(w.grad()(i, j), x.value()(0, i));
  }
}

TEST(TensorTest, UnreachableParameterHasZeroGradient) {
  Tensor used = Tensor::parameter(Matrix::Ones(2, 2));
  Tensor unused = Tensor::parameter(Matrix::Ones(2, 2));
  sum(used).backward();
  EXPECT_FALSE(unused.has_grad());
  EXPECT_TRUE(unused.grad().isZero());
}

TEST(TensorTest, BackwardOnNonScalarThrows) {
  EXPECT_THROW(Tensor::parameter(Matrix::Ones(2, 2)).backward(), ShapeError);
}

TEST(TensorTest, ShapeErrorNamesBothShapes) {
  try {
    matmul(Tensor::zeros(2, 3), Tensor::zeros(2, 3));
    FAIL();
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("(2x3)"), std::string::npos) << msg;
  }
  EXPECT_THROW(add(Tensor::zeros(2, 3), Tensor::zeros(3, 2)), ShapeError);
}

TEST(TensorTest, NonFiniteForwardIsHardError) {
  EXPECT_THROW(Tensor::constant(Matrix::Constant(1, 1, NAN)), NonFiniteError);
  const Tensor big = Tensor::constant(Matrix::Constant(1, 1, 1e200));
  EXPECT_THROW(mul(big, big), NonFiniteError);
}

TEST(TensorTest, NoGradGuardSkipsTape) {
  Tensor w = Tensor::parameter(Matrix::Ones(2, 2));
  Tensor y;
  {
    NoGradGuard guard;
    y = sum(w);
  }
  EXPECT_FALSE(y.requires_grad());
  EXPECT_TRUE(grad_enabled());
}

TEST(TensorTest, ForwardIsDeterministic) {
  Rng r1(9), r2(9);
  const Tensor a = Tensor::constant(random_matrix(4, 4, r1));
  const Tensor b = Tensor::constant(random_matrix(4, 4, r2));
  const Tensor x = layer_norm_rows(softmax_rows(matmul(a, a)));
  const Tensor y = layer_norm_rows(softmax_rows(matmul(b, b)));
  EXPECT_EQ(std::memcmp(x.value().data(), y.value().data(), sizeof(double) * 16), 0);
}

ParameterStore make_store(uint64_t seed) {
  ParameterStore store;
  Rng rng(seed);
  store.add("w", 3, 4, Init::kGlorot, rng);
  store.add("b", 1, 4, Init::kZeros, rng);
  store.add("e", 5, 4, Init::kNormal, rng);
  store.add("s", 1, 1, Init::kConstant, rng, 0.1);
  return store;
}

TEST(AdamTest, ZeroGradientLeavesParametersUnchanged) {
  ParameterStore store = make_store(1);
  ParameterStore before = make_store(1);
  store.adam_step({});
  EXPECT_TRUE(store.values_equal(before));
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  ParameterStore store;
  Rng rng(0);
  Tensor& x = store.add("x", 1, 1, Init::kConstant, rng, 2.0);
  x.node()->accumulate(Matrix::Ones(1, 1));
  AdamConfig config;
  config.learning_rate = 1e-3;
  store.adam_step(config);
  // m_hat = 1, v_hat = 1, so the step is lr / (1 + eps).
  EXPECT_NEAR(x.item(), 2.0 - 1e-3 / (1.0 + 1e-8), 1e-15);
}

TEST(AdamTest, IdenticalStoresUpdateIdentically) {
  ParameterStore a = make_store(2);
  ParameterStore b = make_store(2);
  for (int step = 0; step < 3; ++step) {
    for (ParameterStore* s : {&a, &b}) {
      s->zero_grad();
      sum(square(matmul(s->get("e"), transpose(s->get("w"))))).backward();
      s->adam_step({.learning_rate = 1e-2, .max_grad_norm = 0.5});
    }
  }
  EXPECT_TRUE(a.state_equal(b));
  EXPECT_FALSE(a.values_equal(make_store(2)));
}

TEST(AdamTest, ClippingBoundsGlobalNorm) {
  ParameterStore store;
  Rng rng(0);
  Tensor& x = store.add("x", 1, 2, Init::kZeros, rng);
  x.node()->accumulate(Matrix{{30.0, 40.0}});
  EXPECT_DOUBLE_EQ(store.grad_norm(), 50.0);
  store.adam_step({.learning_rate = 1.0, .max_grad_norm = 1.0});
  // Clipping rescales both entries equally, so the normalized step is unchanged.
  EXPECT_NEAR(x.value()(0, 0), -1.0, 1e-6);
}

TEST(CheckpointTest, RoundTripIsBitwiseIncludingMoments) {
  ParameterStore store = make_store(3);
  sum(square(store.get("w"))).backward();
  store.adam_step({.learning_rate = 0.01});
  std::stringstream buffer;
  store.save(buffer);
  ParameterStore loaded;
  loaded.load(buffer);
  EXPECT_TRUE(loaded.state_equal(store));
  EXPECT_EQ(loaded.adam_steps(), 1);
}

TEST(CheckpointTest, RejectsBadMagicAndTruncation) {
  std::stringstream junk("not a checkpoint at all");
  ParameterStore store;
  EXPECT_THROW(store.load(junk), CheckpointError);
  std::stringstream buffer;
  make_store(4).save(buffer);
  const std::string bytes = buffer.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(store.load(truncated), std::runtime_error);
}

TEST(CheckpointTest, DuplicateNamesRejected) {
  ParameterStore store;
  Rng rng(0);
  store.add("w", 1, 1, Init::kZeros, rng);
  EXPECT_THROW(store.add("w", 1, 1, Init::kZeros, rng), std::invalid_argument);
}

}  // namespace
}  // namespace revibranch
