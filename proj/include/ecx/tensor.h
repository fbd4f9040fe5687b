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

#ifndef ECX_TENSOR_H_
#define ECX_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ecx {

using Shape = std::vector<std::size_t>;

std::size_t ShapeElements(const Shape& shape);
std::string ShapeString(const Shape& shape);

// Dense row-major tensor of doubles. Values are fixed at construction; all
// operations below return new tensors.
class Tensor {
 public:
  Tensor() = default;
  // Zero-filled tensor of the given shape.
  explicit Tensor(Shape shape);
  // Throws ContractError unless data.size() == ShapeElements(shape).
  Tensor(Shape shape, std::vector<double> data);

  static Tensor Filled(Shape shape, double value);
  static Tensor Identity(std::size_t n);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<const double> data() const { return data_; }
  double operator[](std::size_t i) const { return data_[i]; }

  double at(std::size_t i, std::size_t j) const;
  double at(std::size_t i, std::size_t j, std::size_t k) const;

  // Same data, new shape with equal element count.
  Tensor Reshaped(Shape shape) const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Mean along `axis`; the axis is removed from the result shape.
Tensor MeanAxis(const Tensor& t, std::size_t axis);

// Stacks rows of `a` then rows of `b`. Trailing shapes must agree.
Tensor ConcatAxis0(const Tensor& a, const Tensor& b);

// Inverse of ConcatAxis0: first `rows` leading slices, then the rest.
std::pair<Tensor, Tensor> SplitAxis0(const Tensor& t, std::size_t rows);

// Rank-2 matrix product [m x k] * [k x n].
Tensor MatMul(const Tensor& a, const Tensor& b);

Tensor Sigmoid(const Tensor& t);
double Sigmoid(double x);
Tensor ElementwiseAdd(const Tensor& a, const Tensor& b);
Tensor ElementwiseMul(const Tensor& a, const Tensor& b);
Tensor ElementwiseMax(const Tensor& a, const Tensor& b);

// Uniform values in [lo, hi) from a 64-bit Mersenne Twister. The mapping from
// engine output to double is fixed here, so a seed yields the same tensor on
// every platform.
Tensor SeededUniform(Shape shape, double lo, double hi, unsigned long long seed);

}  // namespace ecx

#endif  // ECX_TENSOR_H_
