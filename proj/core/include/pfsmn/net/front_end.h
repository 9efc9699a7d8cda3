// pfsmn/net/front_end.h

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

#ifndef PFSMN_NET_FRONT_END_H_
#define PFSMN_NET_FRONT_END_H_

#include <vector>

#include "pfsmn/net/config.h"
#include "pfsmn/numeric/tensor.h"

namespace pfsmn {

/// Residual CNN front-end.  Features [T x F] are viewed as a 1 x T x F map
/// (time = rows, frequency = columns).  Each layer is conv + relu with stride 1
/// in time, so the output keeps T frames; subsampling layers use stride 2 in
/// frequency.  A shortcut spans every kernel-size transition: the input of the
/// first layer of the span (through a 1x1 projection when channels or
/// frequency resolution differ) is added to the second layer's pre-activation.
struct FrontEndParams {
  std::vector<Tensor *> kernels;
  std::vector<Tensor *> biases;
  // Indexed by the span's second layer; null when that layer closes no
  // projected shortcut.
  std::vector<Tensor *> projections;
};

struct FrontEndActivations {
  Tensor input_map;              // 1 x T x F
  std::vector<Tensor> pre;       // per layer, conv output (+ shortcut)
  std::vector<Tensor> post;      // per layer, after relu
  std::vector<Tensor> shortcut;  // per layer; empty unless it closes a span
  Tensor output;                 // T x (C_last * F_last)
};

FrontEndActivations FrontEndForward(const Tensor &features, const FrontEndConfig &cfg,
                                    const FrontEndParams &params);
// Reads output.grad(); accumulates into parameter grads and input_map.grad().
void FrontEndBackward(FrontEndActivations &acts, const FrontEndConfig &cfg,
                      const FrontEndParams &params);

}  // namespace pfsmn

#endif  // PFSMN_NET_FRONT_END_H_
