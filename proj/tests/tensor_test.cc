// Copyright 2026 The ecx Authors.
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

#include "ecx/tensor.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ecx/errors.h"

namespace ecx {
namespace {

Tensor RandomTensor(Shape shape, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<double> data(ShapeElements(shape));
  for (double& v : data) v = u(rng);
  return Tensor(std::move(shape), std::move(data));
}

TEST(TensorTest, RejectsDataShapeMismatch) {
  EXPECT_THROW(Tensor({2, 2}, {1, 2, 3}), ContractError);
}

TEST(TensorTest, MeanAxisHandAverage) {
  Tensor t({2, 2}, {1, 3, 5, 7});
  EXPECT_EQ(MeanAxis(t, 0), Tensor({2}, {3, 5}));
  EXPECT_EQ(MeanAxis(t, 1), Tensor({2}, {2, 6}));
}

TEST(TensorTest, MeanAxisOfSizeOneDropsAxis) {
  Tensor t({3, 1, 2}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(MeanAxis(t, 1), Tensor({3, 2}, {1, 2, 3, 4, 5, 6}));
}

TEST(TensorTest, MeanAxisOfConstantIsConstant) {
  Tensor t = Tensor::Filled({2, 3, 4}, 2.5);
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const Tensor m = MeanAxis(t, axis);
    for (double v : m.data()) EXPECT_DOUBLE_EQ(v, 2.5);
  }
}

TEST(TensorTest, MeanAxisOutOfRange) {
  EXPECT_THROW(MeanAxis(Tensor({2, 2}), 2), ContractError);
}

TEST(TensorTest, MeanAxisCommutesOnRank3) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> dim(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor t = RandomTensor({dim(rng), dim(rng), dim(rng)}, rng);
    Tensor a = MeanAxis(MeanAxis(t, 0), 0);
    Tensor b = MeanAxis(MeanAxis(t, 1), 0);
    ASSERT_EQ(a.shape(), b.shape());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
  }
}

TEST(TensorTest, ConcatAxis0) {
  Tensor a({2, 1}, {2, 6}), b({2, 1}, {3, 5});
  EXPECT_EQ(ConcatAxis0(a, b), Tensor({4, 1}, {2, 6, 3, 5}));
  EXPECT_EQ(ConcatAxis0(a, Tensor({0, 1})), a);
  EXPECT_THROW(ConcatAxis0(Tensor({1, 2}), Tensor({1, 3})), ContractError);
}

TEST(TensorTest, ConcatThenSplitRecoversInputs) {
  std::mt19937 rng(11);
  for (std::size_t trial = 0; trial < 50; ++trial) {
    Tensor a = RandomTensor({1 + trial % 3, 4}, rng);
    Tensor b = RandomTensor({trial % 4, 4}, rng);
    auto [x, y] = SplitAxis0(ConcatAxis0(a, b), a.shape()[0]);
    EXPECT_EQ(x, a);
    EXPECT_EQ(y, b);
  }
}

TEST(TensorTest, MatMul) {
  Tensor a({2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(MatMul(a, Tensor({2, 1}, {1, 1})), Tensor({2, 1}, {3, 7}));
  EXPECT_EQ(MatMul(a, Tensor::Identity(2)), a);
  EXPECT_EQ(MatMul(a, Tensor({2, 3})), Tensor({2, 3}));
  EXPECT_THROW(MatMul(a, Tensor({3, 1})), ContractError);
}

TEST(TensorTest, MatMulIsLinear) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor a1 = RandomTensor({3, 4}, rng), a2 = RandomTensor({3, 4}, rng);
    Tensor b = RandomTensor({4, 2}, rng);
    Tensor lhs = MatMul(ElementwiseAdd(a1, a2), b);
    Tensor rhs = ElementwiseAdd(MatMul(a1, b), MatMul(a2, b));
    for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-9);
  }
}

TEST(TensorTest, SigmoidValues) {
  EXPECT_DOUBLE_EQ(Sigmoid(0.0), 0.5);
  EXPECT_NEAR(Sigmoid(1.0), 0.7310585786, 1e-9);
  for (double x : {-700.0, -30.0, -1.0, 1.0, 30.0}) {
    const double s = Sigmoid(x);
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 1.0);
  }
}

TEST(TensorTest, ElementwiseOps) {
  Tensor t({3}, {1, -2, 3});
  EXPECT_EQ(ElementwiseMax(t, t), t);
  EXPECT_EQ(ElementwiseMul(t, t), Tensor({3}, {1, 4, 9}));
  EXPECT_THROW(ElementwiseMax(t, Tensor({2})), ContractError);
  EXPECT_THROW(ElementwiseMul(t, Tensor({3, 1})), ContractError);
}

TEST(TensorTest, SeededUniformIsReproducibleAndBounded) {
  Tensor a = SeededUniform({5, 5}, -0.1, 0.1, 42);
  EXPECT_EQ(a, SeededUniform({5, 5}, -0.1, 0.1, 42));
  EXPECT_NE(a, SeededUniform({5, 5}, -0.1, 0.1, 43));
  for (double v : a.data()) {
    EXPECT_GE(v, -0.1);
    EXPECT_LT(v, 0.1);
  }
}

}  // namespace
}  // namespace ecx
