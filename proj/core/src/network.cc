// network.cc

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

#include "pfsmn/net/network.h"

#include <cmath>

#include "pfsmn/error.h"
#include "pfsmn/numeric/ops.h"

namespace pfsmn {

namespace {

constexpr std::size_t kParamsPerBlock = 5;

bool EndsWith(const std::string &s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Tensor NetworkActivations::InputGrad() const {
  const Tensor &map = front.input_map;
  Tensor grad({map.dim(1), map.dim(2)});
  std::span<const double> g = map.grad();
  for (std::size_t i = 0; i < g.size(); ++i) grad[i] = g[i];
  return grad;
}

Network::Network(NetworkConfig cfg) : cfg_(std::move(cfg)) {
  Validate(cfg_);
  for (auto &entry : ParamLayout(cfg_)) {
    names_.push_back(entry.name);
    params_.emplace_back(entry.shape);
  }
  first_block_param_ = 0;
  while (first_block_param_ < names_.size() &&
         names_[first_block_param_].rfind("frontend.", 0) == 0) {
    ++first_block_param_;
  }
  head_param_ = first_block_param_ + kParamsPerBlock * cfg_.blocks.size();
}

void Network::Initialize(Rng &rng) {
  for (std::size_t p = 0; p < params_.size(); ++p) {
    Tensor &t = params_[p];
    const std::string &name = names_[p];
    if (EndsWith(name, ".bias")) {
      t.Fill(0.0);
    } else if (EndsWith(name, ".memory.past") || EndsWith(name, ".memory.future")) {
      t.Fill(1.0 / static_cast<double>(t.dim(0)));
    } else {
      double fan_in, fan_out;
      if (t.rank() == 4) {
        const double field = static_cast<double>(t.dim(2) * t.dim(3));
        fan_in = static_cast<double>(t.dim(1)) * field;
        fan_out = static_cast<double>(t.dim(0)) * field;
      } else {
        fan_in = static_cast<double>(t.dim(0));
        fan_out = static_cast<double>(t.dim(1));
      }
      // Convolution kernels feed a ReLU directly: He uniform. Affines: Glorot uniform.
      const double limit =
          t.rank() == 4 ? std::sqrt(6.0 / fan_in) : std::sqrt(6.0 / (fan_in + fan_out));
      for (double &v : t.values()) v = rng.Uniform(-limit, limit);
    }
  }
}

std::vector<Tensor *> Network::ParamPointers() {
  std::vector<Tensor *> out;
  out.reserve(params_.size());
  for (auto &t : params_) out.push_back(&t);
  return out;
}

Tensor &Network::Param(std::string_view name) {
  for (std::size_t p = 0; p < names_.size(); ++p) {
    if (names_[p] == name) return params_[p];
  }
  Fail(ErrorKind::kConfig, "no parameter named '" + std::string(name) + "'");
}

std::size_t Network::NumParams() const {
  std::size_t n = 0;
  for (const auto &t : params_) n += t.size();
  return n;
}

FrontEndParams Network::FrontParams() {
  FrontEndParams fp;
  const std::size_t n = cfg_.front_end.layers.size();
  fp.projections.assign(n, nullptr);
  for (std::size_t i = 0; i < n; ++i) {
    fp.kernels.push_back(&params_[2 * i]);
    fp.biases.push_back(&params_[2 * i + 1]);
  }
  std::size_t next = 2 * n;
  for (const auto &span : ShortcutSpans(cfg_.front_end)) {
    if (span.needs_projection) fp.projections[static_cast<std::size_t>(span.second)] = &params_[next++];
  }
  return fp;
}

BlockParams Network::BlockParamsFor(std::size_t block) {
  const std::size_t base = first_block_param_ + kParamsPerBlock * block;
  return BlockParams{&params_[base], &params_[base + 1], &params_[base + 2],
                     &params_[base + 3], &params_[base + 4]};
}

NetworkActivations Network::Forward(const Tensor &features) const {
  if (features.rank() != 2 || features.cols() != static_cast<std::size_t>(cfg_.input_dim)) {
    Fail(ErrorKind::kConfig, "network expects T x " + std::to_string(cfg_.input_dim) +
                                 " features, got " + ShapeToString(features.shape()));
  }
  // Forward only reads parameters; the views are non-const for symmetry with
  // Backward.
  auto *self = const_cast<Network *>(this);
  NetworkActivations acts;
  const bool dfsmn = cfg_.architecture == Architecture::kDfsmn;

  if (cfg_.front_end.enabled()) {
    acts.front = FrontEndForward(features, cfg_.front_end, self->FrontParams());
  } else {
    acts.front.input_map = Tensor({1, features.rows(), features.cols()},
                                  std::vector<double>(features.values().begin(),
                                                      features.values().end()));
    acts.front.output = features;
    acts.front.output.ClearGrad();
  }

  acts.blocks.reserve(cfg_.blocks.size());
  for (std::size_t l = 0; l < cfg_.blocks.size(); ++l) {
    const Tensor &x = l == 0 ? acts.front.output : acts.blocks[l - 1].out;
    const int depth = cfg_.blocks[l].mem.skip_depth;
    const Tensor *skip =
        depth > 0 ? &acts.blocks[l - static_cast<std::size_t>(depth)].out : nullptr;
    acts.blocks.push_back(
        BlockForward(x, cfg_.blocks[l], self->BlockParamsFor(l), skip, dfsmn));
  }

  const Tensor &top = cfg_.blocks.empty() ? acts.front.output : acts.blocks.back().out;
  acts.chain_output = Affine(top, ParamAt(head_param_), ParamAt(head_param_ + 1));
  acts.xent_logits = Affine(top, ParamAt(head_param_ + 2), ParamAt(head_param_ + 3));
  acts.xent_log_probs = LogSoftmax(acts.xent_logits);
  return acts;
}

void Network::Backward(NetworkActivations &acts) {
  const bool dfsmn = cfg_.architecture == Architecture::kDfsmn;
  LogSoftmaxBackward(acts.xent_log_probs, acts.xent_logits);

  Tensor &top = cfg_.blocks.empty() ? acts.front.output : acts.blocks.back().out;
  AffineBackward(acts.chain_output, top, params_[head_param_], params_[head_param_ + 1]);
  AffineBackward(acts.xent_logits, top, params_[head_param_ + 2], params_[head_param_ + 3]);

  for (std::size_t l = cfg_.blocks.size(); l-- > 0;) {
    Tensor &x = l == 0 ? acts.front.output : acts.blocks[l - 1].out;
    const int depth = cfg_.blocks[l].mem.skip_depth;
    Tensor *skip = depth > 0 ? &acts.blocks[l - static_cast<std::size_t>(depth)].out : nullptr;
    BlockBackward(acts.blocks[l], x, cfg_.blocks[l], BlockParamsFor(l), skip, dfsmn);
  }

  if (cfg_.front_end.enabled()) {
    FrontEndBackward(acts.front, cfg_.front_end, FrontParams());
  } else if (acts.front.output.has_grad()) {
    std::span<const double> g = acts.front.output.grad();
    std::span<double> dmap = acts.front.input_map.grad();
    for (std::size_t i = 0; i < g.size(); ++i) dmap[i] += g[i];
  }
}

void Network::ZeroGrad() {
  for (auto &t : params_) t.ZeroGrad();
}

std::uint64_t Network::ReluSignature(const NetworkActivations &acts) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  auto mix = [&hash](const Tensor &pre) {
    for (double v : pre.values()) {
      hash ^= v > 0.0 ? 0x9Eu : 0x3Du;
      hash *= 0x100000001b3ull;
    }
  };
  for (const auto &pre : acts.front.pre) mix(pre);
  for (const auto &block : acts.blocks) mix(block.affine);
  return hash;
}

}  // namespace pfsmn
