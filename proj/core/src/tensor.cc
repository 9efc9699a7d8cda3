// tensor.cc

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

#include "pfsmn/numeric/tensor.h"

#include <algorithm>
#include <cmath>

#include "pfsmn/error.h"

namespace pfsmn {

std::string ShapeToString(const Shape &shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::size_t NumElements(const Shape &shape) {
  std::size_t n = 1;
  for (std::size_t extent : shape) n *= extent;
  return n;
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  for (std::size_t extent : shape_) {
    if (extent == 0) {
      Fail(ErrorKind::kConfig,
           "tensor extents must be positive, got " + ShapeToString(shape_));
    }
  }
  values_.assign(NumElements(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> values) : Tensor(std::move(shape)) {
  if (values.size() != values_.size()) {
    Fail(ErrorKind::kConfig, "tensor of shape " + ShapeToString(shape_) +
                                 " cannot hold " + std::to_string(values.size()) +
                                 " values");
  }
  values_ = std::move(values);
}

Tensor Tensor::Matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

std::span<double> Tensor::grad() {
  if (grad_.size() != values_.size()) grad_.assign(values_.size(), 0.0);
  return grad_;
}

void Tensor::ZeroGrad() { grad_.assign(values_.size(), 0.0); }

void Tensor::Fill(double value) { std::fill(values_.begin(), values_.end(), value); }

bool Tensor::AllFinite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(values_.begin(), values_.end(), finite) &&
         std::all_of(grad_.begin(), grad_.end(), finite);
}

}  // namespace pfsmn
