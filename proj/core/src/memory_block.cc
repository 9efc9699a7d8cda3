// memory_block.cc

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

#include "pfsmn/net/memory_block.h"

#include "pfsmn/error.h"
#include "pfsmn/numeric/ops.h"

namespace pfsmn {

namespace {

void CheckMemoryShapes(const Tensor &h, const Tensor *skip, const Tensor &past,
                       const Tensor &future, const MemoryBlockSpec &spec) {
  const std::size_t dim = static_cast<std::size_t>(spec.hidden_dim);
  auto mismatch = [](const std::string &what, const Tensor &t) {
    Fail(ErrorKind::kConfig,
         "memory block: " + what + " has shape " + ShapeToString(t.shape()));
  };
  if (h.rank() != 2 || h.cols() != dim) mismatch("h", h);
  if (skip != nullptr && skip->shape() != h.shape()) mismatch("skip input", *skip);
  if (past.rank() != 2 || past.rows() != static_cast<std::size_t>(spec.past_order + 1) ||
      past.cols() != dim) {
    mismatch("past taps", past);
  }
  if (future.rank() != 2 ||
      future.rows() != static_cast<std::size_t>(spec.future_order + 1) ||
      future.cols() != dim) {
    mismatch("future taps", future);
  }
}

}  // namespace

Tensor MemoryBlockForward(const Tensor &h, const Tensor *skip, const Tensor &past,
                          const Tensor &future, const MemoryBlockSpec &spec,
                          bool include_current) {
  CheckMemoryShapes(h, skip, past, future, spec);
  const long frames = static_cast<long>(h.rows());
  const std::size_t dim = h.cols();
  Tensor out = skip != nullptr ? *skip : Tensor(h.shape());
  out.ClearGrad();
  for (long t = 0; t < frames; ++t) {
    double *orow = out.data() + static_cast<std::size_t>(t) * dim;
    if (include_current) {
      const double *hrow = h.data() + static_cast<std::size_t>(t) * dim;
      for (std::size_t d = 0; d < dim; ++d) orow[d] += hrow[d];
    }
    for (int i = 0; i <= spec.past_order; ++i) {
      const long src = t - static_cast<long>(spec.past_stride) * i;
      if (src < 0) break;
      const double *hrow = h.data() + static_cast<std::size_t>(src) * dim;
      const double *tap = past.data() + static_cast<std::size_t>(i) * dim;
      for (std::size_t d = 0; d < dim; ++d) orow[d] += tap[d] * hrow[d];
    }
    for (int j = 0; j <= spec.future_order; ++j) {
      const long src = t + static_cast<long>(spec.future_stride) * j;
      if (src >= frames) break;
      const double *hrow = h.data() + static_cast<std::size_t>(src) * dim;
      const double *tap = future.data() + static_cast<std::size_t>(j) * dim;
      for (std::size_t d = 0; d < dim; ++d) orow[d] += tap[d] * hrow[d];
    }
  }
  return out;
}

void MemoryBlockBackward(const Tensor &out, Tensor &h, Tensor *skip, Tensor &past,
                         Tensor &future, const MemoryBlockSpec &spec,
                         bool include_current) {
  if (!out.has_grad()) return;
  CheckMemoryShapes(h, skip, past, future, spec);
  const long frames = static_cast<long>(h.rows());
  const std::size_t dim = h.cols();
  std::span<const double> dout = out.grad();
  std::span<double> dh = h.grad();
  std::span<double> dpast = past.grad();
  std::span<double> dfuture = future.grad();
  if (skip != nullptr) {
    std::span<double> dskip = skip->grad();
    for (std::size_t k = 0; k < dskip.size(); ++k) dskip[k] += dout[k];
  }
  for (long t = 0; t < frames; ++t) {
    const double *drow = dout.data() + static_cast<std::size_t>(t) * dim;
    if (include_current) {
      double *dhrow = dh.data() + static_cast<std::size_t>(t) * dim;
      for (std::size_t d = 0; d < dim; ++d) dhrow[d] += drow[d];
    }
    for (int i = 0; i <= spec.past_order; ++i) {
      const long src = t - static_cast<long>(spec.past_stride) * i;
      if (src < 0) break;
      const std::size_t off = static_cast<std::size_t>(src) * dim;
      const std::size_t tap = static_cast<std::size_t>(i) * dim;
      for (std::size_t d = 0; d < dim; ++d) {
        dpast[tap + d] += drow[d] * h[off + d];
        dh[off + d] += drow[d] * past[tap + d];
      }
    }
    for (int j = 0; j <= spec.future_order; ++j) {
      const long src = t + static_cast<long>(spec.future_stride) * j;
      if (src >= frames) break;
      const std::size_t off = static_cast<std::size_t>(src) * dim;
      const std::size_t tap = static_cast<std::size_t>(j) * dim;
      for (std::size_t d = 0; d < dim; ++d) {
        dfuture[tap + d] += drow[d] * h[off + d];
        dh[off + d] += drow[d] * future[tap + d];
      }
    }
  }
}

BlockActivations BlockForward(const Tensor &x, const BlockConfig &cfg,
                              const BlockParams &params, const Tensor *skip,
                              bool include_current) {
  BlockActivations acts;
  acts.affine = Affine(x, *params.affine_weight, *params.affine_bias);
  acts.relu = Relu(acts.affine);
  acts.h = MatMul(acts.relu, *params.linear_weight);
  acts.out = MemoryBlockForward(acts.h, skip, *params.past, *params.future, cfg.mem,
                                include_current);
  return acts;
}

void BlockBackward(BlockActivations &acts, Tensor &x, const BlockConfig &cfg,
                   const BlockParams &params, Tensor *skip, bool include_current) {
  if (!acts.out.has_grad()) return;
  MemoryBlockBackward(acts.out, acts.h, skip, *params.past, *params.future, cfg.mem,
                      include_current);
  MatMulBackward(acts.h, acts.relu, *params.linear_weight);
  ReluBackward(acts.relu, acts.affine);
  AffineBackward(acts.affine, x, *params.affine_weight, *params.affine_bias);
}

}  // namespace pfsmn
