// grad_suite.cc

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

#include "pfsmn/train/grad_suite.h"

#include <cstdio>
#include <functional>

#include "pfsmn/error.h"
#include "pfsmn/graph/phone_lm.h"
#include "pfsmn/graph/topology.h"
#include "pfsmn/loss/chain_loss.h"
#include "pfsmn/net/config.h"
#include "pfsmn/net/memory_block.h"
#include "pfsmn/net/network.h"
#include "pfsmn/numeric/grad_check.h"
#include "pfsmn/numeric/ops.h"
#include "pfsmn/numeric/rng.h"

namespace pfsmn {

namespace {

Tensor RandomTensor(Shape shape, Rng &rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (double &v : t.values()) v = scale * rng.Normal();
  return t;
}

// Weighted sum of an op's output: the scalar objective whose gradient w.r.t.
// the output is exactly `weights`.
double Project(const Tensor &out, const Tensor &weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * weights[i];
  return s;
}

void Seed(Tensor &out, const Tensor &weights) {
  auto g = out.grad();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = weights[i];
}

std::uint64_t SignOf(const Tensor &t) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (double v : t.values()) {
    h ^= v > 0.0 ? 1u : 2u;
    h *= 0x100000001b3ull;
  }
  return h;
}

void ClearAll(std::initializer_list<Tensor *> ts) {
  for (Tensor *t : ts) t->ZeroGrad();
}

GradCheckReport CheckAffine(Rng &rng, const GradCheckOptions &opts) {
  const std::size_t t = static_cast<std::size_t>(rng.UniformRange(1, 6));
  const std::size_t in = static_cast<std::size_t>(rng.UniformRange(1, 7));
  const std::size_t out = static_cast<std::size_t>(rng.UniformRange(1, 7));
  Tensor x = RandomTensor({t, in}, rng), w = RandomTensor({in, out}, rng),
         b = RandomTensor({out}, rng), proj = RandomTensor({t, out}, rng);
  ClearAll({&x, &w, &b});
  Tensor y = Affine(x, w, b);
  Seed(y, proj);
  AffineBackward(y, x, w, b);
  Tensor *params[] = {&x, &w, &b};
  return GradCheck([&] { return Project(Affine(x, w, b), proj); }, params, opts);
}

GradCheckReport CheckRelu(Rng &rng, const GradCheckOptions &opts) {
  const std::size_t t = static_cast<std::size_t>(rng.UniformRange(1, 6));
  const std::size_t d = static_cast<std::size_t>(rng.UniformRange(1, 9));
  Tensor x = RandomTensor({t, d}, rng), proj = RandomTensor({t, d}, rng);
  x.ZeroGrad();
  Tensor y = Relu(x);
  Seed(y, proj);
  ReluBackward(y, x);
  Tensor *params[] = {&x};
  return GradCheck([&] { return Project(Relu(x), proj); }, params, opts,
                   [&] { return SignOf(x); });
}

GradCheckReport CheckConv(Rng &rng, const GradCheckOptions &opts) {
  Conv2dOptions co;
  co.stride_h = rng.Uniform() < 0.5 ? 1 : 2;
  co.stride_w = rng.Uniform() < 0.5 ? 1 : 2;
  co.padding = rng.Uniform() < 0.5 ? Padding::kSame : Padding::kValid;
  const std::size_t kh = rng.Uniform() < 0.5 ? 3 : 5, kw = rng.Uniform() < 0.5 ? 1 : 3;
  const std::size_t c = static_cast<std::size_t>(rng.UniformRange(1, 3));
  const std::size_t k = static_cast<std::size_t>(rng.UniformRange(1, 3));
  const std::size_t h = kh + static_cast<std::size_t>(rng.UniformRange(0, 4));
  const std::size_t w = kw + static_cast<std::size_t>(rng.UniformRange(0, 4));
  Tensor x = RandomTensor({c, h, w}, rng), kern = RandomTensor({k, c, kh, kw}, rng),
         bias = RandomTensor({k}, rng);
  ClearAll({&x, &kern, &bias});
  Tensor y = Conv2d(x, kern, &bias, co);
  Tensor proj = RandomTensor(y.shape(), rng);
  Seed(y, proj);
  Conv2dBackward(y, x, kern, &bias, co);
  Tensor *params[] = {&x, &kern, &bias};
  return GradCheck([&] { return Project(Conv2d(x, kern, &bias, co), proj); }, params, opts);
}

GradCheckReport CheckMemoryBlock(Rng &rng, const GradCheckOptions &opts) {
  MemoryBlockSpec spec;
  spec.past_order = rng.UniformRange(0, 4);
  spec.future_order = rng.UniformRange(0, 3);
  spec.past_stride = rng.UniformRange(1, 2);
  spec.future_stride = rng.UniformRange(1, 2);
  spec.hidden_dim = rng.UniformRange(1, 4);
  const bool include_current = rng.Uniform() < 0.5;
  const bool with_skip = rng.Uniform() < 0.5;
  const std::size_t t = static_cast<std::size_t>(rng.UniformRange(1, 9));
  const auto d = static_cast<std::size_t>(spec.hidden_dim);
  Tensor h = RandomTensor({t, d}, rng), skip = RandomTensor({t, d}, rng),
         past = RandomTensor({static_cast<std::size_t>(spec.past_order) + 1, d}, rng),
         future = RandomTensor({static_cast<std::size_t>(spec.future_order) + 1, d}, rng),
         proj = RandomTensor({t, d}, rng);
  ClearAll({&h, &skip, &past, &future});
  Tensor *skip_ptr = with_skip ? &skip : nullptr;
  Tensor y = MemoryBlockForward(h, skip_ptr, past, future, spec, include_current);
  Seed(y, proj);
  MemoryBlockBackward(y, h, skip_ptr, past, future, spec, include_current);
  std::vector<Tensor *> params = {&h, &past, &future};
  if (with_skip) params.push_back(&skip);
  return GradCheck(
      [&] { return Project(MemoryBlockForward(h, skip_ptr, past, future, spec, include_current), proj); },
      params, opts);
}

NetworkConfig SmallNetworkConfig(Rng &rng) {
  const int channels[] = {2, 2, 3, 3, 3, 4};
  const int orders[] = {1, 1, 2, 3};
  const int strides[] = {1, 1, 1, 2};
  const Architecture arch = rng.Uniform() < 0.5 ? Architecture::kPyramidal : Architecture::kDfsmn;
  NetworkConfig cfg;
  cfg.input_dim = 8;
  cfg.front_end = MakeFrontEnd(channels);
  cfg.blocks = MakeBlocks(orders, strides, 4, 3, arch);
  cfg.output_dim = 4;
  cfg.architecture = arch;
  return cfg;
}

GradCheckReport CheckNetwork(Rng &rng, const GradCheckOptions &base) {
  GradCheckOptions opts = base;
  opts.five_point = true;
  opts.eps = 1e-3;
  Network net(SmallNetworkConfig(rng));
  net.Initialize(rng);
  const std::size_t t = static_cast<std::size_t>(rng.UniformRange(4, 8));
  Tensor x = RandomTensor({t, 8}, rng);
  const std::size_t p = static_cast<std::size_t>(net.config().output_dim);
  Tensor w_chain = RandomTensor({t, p}, rng), w_xent = RandomTensor({t, p}, rng);
  net.ZeroGrad();
  NetworkActivations acts = net.Forward(x);
  Seed(acts.chain_output, w_chain);
  Seed(acts.xent_log_probs, w_xent);
  net.Backward(acts);
  auto params = net.ParamPointers();
  return GradCheck(
      [&] {
        const NetworkActivations a = net.Forward(x);
        return Project(a.chain_output, w_chain) + Project(a.xent_log_probs, w_xent);
      },
      params, opts, [&] { return Network::ReluSignature(net.Forward(x)); });
}

struct LossInstance {
  FrameGraph num;
  FrameGraph den;
  std::vector<int> alignment;
};

LossInstance RandomLossInstance(Rng &rng, int num_phones, int frames) {
  std::vector<std::vector<int>> transcripts;
  for (int i = 0; i < 6; ++i) {
    std::vector<int> s;
    const int len = rng.UniformRange(1, 3);
    for (int j = 0; j < len; ++j) s.push_back(rng.UniformRange(0, num_phones - 1));
    transcripts.push_back(std::move(s));
  }
  const PhoneLm lm = PhoneLm::Estimate(transcripts, num_phones, 2);
  std::vector<int> phones;
  const int len = rng.UniformRange(1, 2);
  std::vector<int> a_frames, b_frames;
  int used = 0;
  for (int j = 0; j < len; ++j) {
    phones.push_back(rng.UniformRange(0, num_phones - 1));
    a_frames.push_back(1);
    b_frames.push_back(0);
    ++used;
  }
  a_frames.back() += frames - used;
  return {FrameGraph(BuildNumeratorGraph(phones, frames, num_phones, &lm)),
          FrameGraph(BuildDenominatorGraph(lm, frames)),
          AlignmentFromDurations(phones, a_frames, b_frames)};
}

GradCheckReport CheckCe(Rng &rng, const GradCheckOptions &opts) {
  const std::size_t t = static_cast<std::size_t>(rng.UniformRange(1, 6));
  const std::size_t k = static_cast<std::size_t>(rng.UniformRange(2, 6));
  Tensor logits = RandomTensor({t, k}, rng, 2.0);
  std::vector<int> targets;
  for (std::size_t i = 0; i < t; ++i) targets.push_back(static_cast<int>(rng.UniformInt(k)));
  const LossReport r = CrossEntropyLoss(logits, targets);
  Seed(logits, r.grad);
  Tensor *params[] = {&logits};
  return GradCheck([&] { return CrossEntropyLoss(logits, targets).value; }, params, opts);
}

GradCheckReport CheckLfmmi(Rng &rng, const GradCheckOptions &opts) {
  const int num_phones = rng.UniformRange(2, 3);
  const int frames = rng.UniformRange(3, 6);
  const double k = rng.Uniform(0.5, 1.5);
  LossInstance inst = RandomLossInstance(rng, num_phones, frames);
  Tensor loglik = RandomTensor({static_cast<std::size_t>(frames),
                                static_cast<std::size_t>(NumPdfs(num_phones))}, rng);
  Seed(loglik, LfmmiLoss(inst.num, inst.den, loglik, k).grad);
  Tensor *params[] = {&loglik};
  return GradCheck([&] { return LfmmiLoss(inst.num, inst.den, loglik, k).value; }, params, opts);
}

GradCheckReport CheckJoint(Rng &rng, const GradCheckOptions &opts) {
  const int num_phones = rng.UniformRange(2, 3);
  const int frames = rng.UniformRange(3, 6);
  LossInstance inst = RandomLossInstance(rng, num_phones, frames);
  const Shape shape = {static_cast<std::size_t>(frames),
                       static_cast<std::size_t>(NumPdfs(num_phones))};
  Tensor loglik = RandomTensor(shape, rng), logits = RandomTensor(shape, rng);
  const double alpha = 0.1, k = 1.0;
  const JointLossReport r = JointLoss(inst.num, inst.den, loglik, logits, inst.alignment, k, alpha);
  Seed(loglik, r.chain_grad);
  Seed(logits, r.xent_grad);
  Tensor *params[] = {&loglik, &logits};
  return GradCheck(
      [&] { return JointLoss(inst.num, inst.den, loglik, logits, inst.alignment, k, alpha).value; },
      params, opts);
}

GradCheckReport CheckL2(Rng &rng, const GradCheckOptions &opts) {
  std::vector<Tensor> storage;
  const int n = rng.UniformRange(1, 3);
  for (int i = 0; i < n; ++i) {
    storage.push_back(RandomTensor({static_cast<std::size_t>(rng.UniformRange(1, 4)),
                                    static_cast<std::size_t>(rng.UniformRange(1, 4))},
                                   rng));
  }
  std::vector<Tensor *> params;
  for (auto &t : storage) {
    t.ZeroGrad();
    params.push_back(&t);
  }
  const double c = rng.Uniform(0.0, 2.0);
  L2Penalty(params, c);
  return GradCheck(
      [&] {
        double s = 0.0;
        for (const Tensor *t : params) {
          for (double v : t->values()) s += v * v;
        }
        return c * s;
      },
      params, opts);
}

std::string WorstText(const GradCheckReport &r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "worst %s analytic %.6e numeric %.6e", r.worst.c_str(),
                r.worst_analytic, r.worst_numeric);
  return buf;
}

struct SuiteCheck {
  const char *name;
  double tol;
  std::function<GradCheckReport(Rng &, const GradCheckOptions &)> run;
};

}  // namespace

std::vector<GradSuiteEntry> RunGradSuite(std::uint64_t first_seed, int num_seeds) {
  if (num_seeds < 1) Fail(ErrorKind::kConfig, "gradient suite needs at least one seed");
  const SuiteCheck checks[] = {
      {"affine", kGradTol, CheckAffine},
      {"relu", kElementwiseGradTol, CheckRelu},
      {"conv2d", kGradTol, CheckConv},
      {"memory_block", kGradTol, CheckMemoryBlock},
      {"network", kGradTol, CheckNetwork},
      {"ce", kGradTol, CheckCe},
      {"lfmmi", kGradTol, CheckLfmmi},
      {"joint", kGradTol, CheckJoint},
      {"l2", kGradTol, CheckL2},
  };
  std::vector<GradSuiteEntry> out;
  for (std::size_t c = 0; c < std::size(checks); ++c) {
    GradSuiteEntry e;
    e.name = checks[c].name;
    e.tol = checks[c].tol;
    for (int s = 0; s < num_seeds; ++s) {
      const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(s);
      Rng rng(seed * 0x100000001b3ULL + c);
      GradCheckOptions opts;
      opts.tol = checks[c].tol;
      opts.seed = seed;
      const GradCheckReport r = checks[c].run(rng, opts);
      e.max_rel_err = std::max(e.max_rel_err, r.max_rel_err);
      e.checked += r.checked;
      e.excluded += r.excluded;
      ++e.seeds;
      if (!r.pass) {
        e.pass = false;
        if (e.failure.empty()) {
          e.failure = "seed " + std::to_string(seed) + ": " +
                      (r.failure.empty() ? WorstText(r) : r.failure);
        }
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace pfsmn
