// pfsmn/net/network.h

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

#ifndef PFSMN_NET_NETWORK_H_
#define PFSMN_NET_NETWORK_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pfsmn/net/config.h"
#include "pfsmn/net/front_end.h"
#include "pfsmn/net/memory_block.h"
#include "pfsmn/numeric/rng.h"
#include "pfsmn/numeric/tensor.h"

namespace pfsmn {

/// Everything one forward pass produced; Backward() consumes it.
struct NetworkActivations {
  FrontEndActivations front;
  std::vector<BlockActivations> blocks;
  Tensor chain_output;  // T x P pseudo log-likelihoods (no softmax)
  Tensor xent_logits;   // T x P, input of the cross-entropy head
  Tensor xent_log_probs;  // log_softmax(xent_logits)

  // Gradient of the loss w.r.t. the input features (after Backward()).
  Tensor InputGrad() const;
};

/// CNN front-end, a stack of FSMN blocks with the skip chain, and two affine
/// heads on the last memory output: the chain head (pseudo log-likelihoods)
/// and the cross-entropy head.
class Network {
 public:
  explicit Network(NetworkConfig cfg);

  // Affine weights ~ U(+-sqrt(6 / (fan_in + fan_out))), conv kernels
  // ~ U(+-sqrt(6 / fan_in)), biases 0, memory taps 1 / (order + 1).
  void Initialize(Rng &rng);

  const NetworkConfig &config() const { return cfg_; }
  std::vector<Tensor> &params() { return params_; }
  const std::vector<Tensor> &params() const { return params_; }
  const std::vector<std::string> &param_names() const { return names_; }
  std::vector<Tensor *> ParamPointers();
  Tensor &Param(std::string_view name);
  std::size_t NumParams() const;

  NetworkActivations Forward(const Tensor &features) const;
  // Reads the gradients stored on chain_output, xent_logits and
  // xent_log_probs; accumulates parameter gradients.
  void Backward(NetworkActivations &acts);
  void ZeroGrad();

  // Fingerprint of every relu's active set, for kink-aware gradient checks.
  static std::uint64_t ReluSignature(const NetworkActivations &acts);

 private:
  FrontEndParams FrontParams();
  BlockParams BlockParamsFor(std::size_t block);
  const Tensor &ParamAt(std::size_t index) const { return params_[index]; }

  NetworkConfig cfg_;
  std::vector<Tensor> params_;
  std::vector<std::string> names_;
  std::size_t first_block_param_ = 0;
  std::size_t head_param_ = 0;
};

}  // namespace pfsmn

#endif  // PFSMN_NET_NETWORK_H_
