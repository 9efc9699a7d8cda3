// pfsmn/loss/chain_loss.h

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

#ifndef PFSMN_LOSS_CHAIN_LOSS_H_
#define PFSMN_LOSS_CHAIN_LOSS_H_

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfsmn/loss/forward_backward.h"
#include "pfsmn/numeric/tensor.h"

namespace pfsmn {

struct LossReport {
  double value = 0.0;
  Tensor grad;  // d value / d input, same shape as the scored matrix
  double num_logprob = 0.0;
  double den_logprob = 0.0;
};

// Sequence-discriminative objective
//   value = log P_num - log P_den,  grad = scale * (gamma_num - gamma_den)
// on the chain output (pseudo log-likelihoods, T x P).  This is the quantity
// to maximize.  Throws kNumeratorInfeasible when the numerator admits no path.
LossReport LfmmiLoss(const FrameGraph &num, const FrameGraph &den, const Tensor &loglik,
                     double scale = 1.0);

// value = -sum_t log softmax(logits_t)[target_t], grad = softmax - onehot.
LossReport CrossEntropyLoss(const Tensor &logits, std::span<const int> targets);

struct JointLossReport {
  double value = 0.0;  // -mmi + alpha * ce, minimized by training
  double alpha = 0.0;
  LossReport mmi;
  LossReport xent;
  Tensor chain_grad;  // d value / d chain output
  Tensor xent_grad;   // d value / d xent logits
};

JointLossReport JointLoss(const FrameGraph &num, const FrameGraph &den,
                          const Tensor &chain_output, const Tensor &xent_logits,
                          std::span<const int> targets, double scale, double alpha);

// Returns c * sum(theta^2) and adds 2 c theta to each parameter gradient.
double L2Penalty(std::span<Tensor *const> params, double coefficient);

nlohmann::json ToJson(const LossReport &report, bool with_grad = false);

}  // namespace pfsmn

#endif  // PFSMN_LOSS_CHAIN_LOSS_H_
