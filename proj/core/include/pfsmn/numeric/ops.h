// pfsmn/numeric/ops.h

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

#ifndef PFSMN_NUMERIC_OPS_H_
#define PFSMN_NUMERIC_OPS_H_

#include <cstddef>
#include <span>

#include "pfsmn/numeric/tensor.h"

namespace pfsmn {

// Every layer op comes as a forward/backward pair.  Backward functions read the
// upstream gradient from out.grad() and *accumulate* into the grad buffers of
// the inputs and parameters; an output without a gradient buffer contributes
// nothing.

// out[t, j] = sum_i x[t, i] * w[i, j] + b[j]
Tensor Affine(const Tensor &x, const Tensor &w, const Tensor &b);
void AffineBackward(const Tensor &out, Tensor &x, Tensor &w, Tensor &b);

// Affine without a bias term.
Tensor MatMul(const Tensor &x, const Tensor &w);
void MatMulBackward(const Tensor &out, Tensor &x, Tensor &w);

// Elementwise max(0, x).  The subgradient at exactly 0 is 0.
Tensor Relu(const Tensor &x);
void ReluBackward(const Tensor &out, Tensor &x);

enum class Padding { kSame, kValid };

struct Conv2dOptions {
  std::size_t stride_h = 1;
  std::size_t stride_w = 1;
  Padding padding = Padding::kSame;
};

// Cross-correlation of x[C x H x W] with kernels[K x C x kh x kw].
// "same" padding yields ceil(H / stride) rows; output row i is centred on input
// row i * stride and taps outside the input read zero.  "valid" padding yields
// (H - kh) / stride + 1 rows.  bias[K] is optional.
Tensor Conv2d(const Tensor &x, const Tensor &kernels, const Tensor *bias,
              const Conv2dOptions &opts);
void Conv2dBackward(const Tensor &out, Tensor &x, Tensor &kernels, Tensor *bias,
                    const Conv2dOptions &opts);

// Row-wise log-softmax of x[T x K].
Tensor LogSoftmax(const Tensor &x);
void LogSoftmaxBackward(const Tensor &out, Tensor &x);

// Max-shifted log(sum(exp(v))); -inf for an empty or all -inf input.
double LogSumExp(std::span<const double> v);
// log(exp(a) + exp(b)).
double LogAdd(double a, double b);

}  // namespace pfsmn

#endif  // PFSMN_NUMERIC_OPS_H_
