// pfsmn/numeric/tensor.h

// Copyright 2026  The pfsmn Authors

// See the top-level COPYING file for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PFSMN_NUMERIC_TENSOR_H_
#define PFSMN_NUMERIC_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pfsmn {

using Shape = std::vector<std::size_t>;

std::string ShapeToString(const Shape &shape);

/// Dense row-major array of doubles with an optional gradient buffer of the
/// same shape.  The gradient is allocated (zero-filled) the first time a
/// mutable view of it is requested.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor Zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor Matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values);

  const Shape &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  // Matrix view; valid for rank-2 tensors.
  std::size_t rows() const { return shape_.at(0); }
  std::size_t cols() const { return shape_.at(1); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double *data() { return values_.data(); }
  const double *data() const { return values_.data(); }

  double &operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double &at(std::size_t r, std::size_t c) { return values_[r * shape_[1] + c]; }
  double at(std::size_t r, std::size_t c) const {
    return values_[r * shape_[1] + c];
  }

  bool has_grad() const { return !grad_.empty(); }
  std::span<double> grad();
  // Empty span when no gradient has been allocated.
  std::span<const double> grad() const { return grad_; }
  void ZeroGrad();
  void ClearGrad() { grad_.clear(); grad_.shrink_to_fit(); }

  void Fill(double value);
  bool AllFinite() const;

 private:
  Shape shape_;
  std::vector<double> values_;
  std::vector<double> grad_;
};

std::size_t NumElements(const Shape &shape);

}  // namespace pfsmn

#endif  // PFSMN_NUMERIC_TENSOR_H_
