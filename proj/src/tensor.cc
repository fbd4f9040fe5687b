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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "ecx/errors.h"

namespace ecx {

std::size_t ShapeElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string ShapeString(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ',';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

Tensor::Tensor(Shape shape)
    : shape_(std::move(shape)), data_(ShapeElements(shape_), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != ShapeElements(shape_)) {
    throw ContractError("tensor data length " + std::to_string(data_.size()) +
                        " does not match shape " + ShapeString(shape_));
  }
}

Tensor Tensor::Filled(Shape shape, double value) {
  std::vector<double> data(ShapeElements(shape), value);
  return Tensor(std::move(shape), std::move(data));
}

Tensor Tensor::Identity(std::size_t n) {
  std::vector<double> data(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) data[i * n + i] = 1.0;
  return Tensor({n, n}, std::move(data));
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw ContractError("axis " + std::to_string(axis) + " out of range for " +
                        ShapeString(shape_));
  }
  return shape_[axis];
}

double Tensor::at(std::size_t i, std::size_t j) const {
  return data_[i * shape_[1] + j];
}

double Tensor::at(std::size_t i, std::size_t j, std::size_t k) const {
  return data_[(i * shape_[1] + j) * shape_[2] + k];
}

Tensor Tensor::Reshaped(Shape shape) const {
  return Tensor(std::move(shape), data_);
}

Tensor MeanAxis(const Tensor& t, std::size_t axis) {
  if (axis >= t.rank()) {
    throw ContractError("mean axis " + std::to_string(axis) +
                        " out of range for " + ShapeString(t.shape()));
  }
  const Shape& shape = t.shape();
  const std::size_t extent = shape[axis];
  if (extent == 0) throw ContractError("mean over an empty axis");
  std::size_t outer = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];

  Shape out_shape;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i != axis) out_shape.push_back(shape[i]);
  }
  std::vector<double> out(outer * inner, 0.0);
  auto src = t.data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t e = 0; e < extent; ++e) {
      const double* row = src.data() + (o * extent + e) * inner;
      double* dst = out.data() + o * inner;
      for (std::size_t i = 0; i < inner; ++i) dst[i] += row[i];
    }
  }
  for (double& v : out) v /= static_cast<double>(extent);
  return Tensor(std::move(out_shape), std::move(out));
}

Tensor ConcatAxis0(const Tensor& a, const Tensor& b) {
  if (a.rank() == 0 || b.rank() == 0 ||
      !std::equal(a.shape().begin() + 1, a.shape().end(),
                  b.shape().begin() + 1, b.shape().end())) {
    throw ContractError("concat trailing shape mismatch: " +
                        ShapeString(a.shape()) + " vs " +
                        ShapeString(b.shape()));
  }
  Shape shape = a.shape();
  shape[0] += b.shape()[0];
  std::vector<double> data(a.data().begin(), a.data().end());
  data.insert(data.end(), b.data().begin(), b.data().end());
  return Tensor(std::move(shape), std::move(data));
}

std::pair<Tensor, Tensor> SplitAxis0(const Tensor& t, std::size_t rows) {
  if (t.rank() == 0 || rows > t.shape()[0]) {
    throw ContractError("split row " + std::to_string(rows) +
                        " out of range for " + ShapeString(t.shape()));
  }
  const std::size_t stride = t.shape()[0] ? t.size() / t.shape()[0] : 0;
  Shape head = t.shape();
  Shape tail = t.shape();
  head[0] = rows;
  tail[0] = t.shape()[0] - rows;
  auto cut = t.data().begin() + static_cast<std::ptrdiff_t>(rows * stride);
  return {Tensor(std::move(head), std::vector<double>(t.data().begin(), cut)),
          Tensor(std::move(tail), std::vector<double>(cut, t.data().end()))};
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.shape()[1] != b.shape()[0]) {
    throw ContractError("matmul dimension mismatch: " +
                        ShapeString(a.shape()) + " x " +
                        ShapeString(b.shape()));
  }
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  std::vector<double> out(m * n, 0.0);
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double lhs = ad[i * k + p];
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += lhs * bd[p * n + j];
    }
  }
  return Tensor({m, n}, std::move(out));
}

double Sigmoid(double x) {
  // Split by sign so exp never overflows.
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

template <typename Fn>
Tensor Unary(const Tensor& t, Fn fn) {
  std::vector<double> out(t.size());
  std::transform(t.data().begin(), t.data().end(), out.begin(), fn);
  return Tensor(t.shape(), std::move(out));
}

template <typename Fn>
Tensor Binary(const Tensor& a, const Tensor& b, Fn fn, const char* name) {
  if (a.shape() != b.shape()) {
    throw ContractError(std::string(name) + " shape mismatch: " +
                        ShapeString(a.shape()) + " vs " +
                        ShapeString(b.shape()));
  }
  std::vector<double> out(a.size());
  std::transform(a.data().begin(), a.data().end(), b.data().begin(),
                 out.begin(), fn);
  return Tensor(a.shape(), std::move(out));
}

}  // namespace

Tensor Sigmoid(const Tensor& t) {
  return Unary(t, [](double x) { return Sigmoid(x); });
}

Tensor ElementwiseAdd(const Tensor& a, const Tensor& b) {
  return Binary(a, b, std::plus<>(), "add");
}

Tensor ElementwiseMul(const Tensor& a, const Tensor& b) {
  return Binary(a, b, std::multiplies<>(), "mul");
}

Tensor ElementwiseMax(const Tensor& a, const Tensor& b) {
  return Binary(
      a, b, [](double x, double y) { return std::max(x, y); }, "max");
}

Tensor SeededUniform(Shape shape, double lo, double hi,
                     unsigned long long seed) {
  std::mt19937_64 engine(seed);
  std::vector<double> data(ShapeElements(shape));
  for (double& v : data) {
    const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    v = lo + (hi - lo) * unit;
  }
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace ecx
