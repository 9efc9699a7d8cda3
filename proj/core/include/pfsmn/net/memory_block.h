// pfsmn/net/memory_block.h

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

#ifndef PFSMN_NET_MEMORY_BLOCK_H_
#define PFSMN_NET_MEMORY_BLOCK_H_

#include "pfsmn/net/config.h"
#include "pfsmn/numeric/tensor.h"

namespace pfsmn {

// out[t] = skip[t] + sum_{i=0..N1} past[i] * h[t - s1*i]
//                  + sum_{j=0..N2} future[j] * h[t + s2*j]
// (elementwise products over hidden units).  Frames outside [0, T) read zero.
// With include_current the standalone h[t] term of the DFSMN baseline is added.
// skip may be null.
Tensor MemoryBlockForward(const Tensor &h, const Tensor *skip, const Tensor &past,
                          const Tensor &future, const MemoryBlockSpec &spec,
                          bool include_current = false);
void MemoryBlockBackward(const Tensor &out, Tensor &h, Tensor *skip, Tensor &past,
                         Tensor &future, const MemoryBlockSpec &spec,
                         bool include_current = false);

/// Parameters of one FSMN block, referenced from the owning network.
struct BlockParams {
  Tensor *affine_weight;
  Tensor *affine_bias;
  Tensor *linear_weight;
  Tensor *past;
  Tensor *future;
};

struct BlockActivations {
  Tensor affine;  // pre-activation
  Tensor relu;
  Tensor h;       // bottleneck projected back to hidden_dim
  Tensor out;     // memory output
};

// affine -> relu -> linear projection -> memory block.
BlockActivations BlockForward(const Tensor &x, const BlockConfig &cfg,
                              const BlockParams &params, const Tensor *skip,
                              bool include_current = false);
void BlockBackward(BlockActivations &acts, Tensor &x, const BlockConfig &cfg,
                   const BlockParams &params, Tensor *skip,
                   bool include_current = false);

}  // namespace pfsmn

#endif  // PFSMN_NET_MEMORY_BLOCK_H_
