// tests/unit/net_test.cc

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

#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "pfsmn/error.h"
#include "pfsmn/net/checkpoint.h"
#include "pfsmn/net/config.h"
#include "pfsmn/net/front_end.h"
#include "pfsmn/net/memory_block.h"
#include "pfsmn/net/network.h"
#include "pfsmn/numeric/grad_check.h"
#include "pfsmn/numeric/ops.h"
#include "pfsmn/numeric/rng.h"
#include "test_util.h"

namespace pfsmn {
namespace {

using testing_util::ExpectKind;
using testing_util::RandomTensor;

MemoryBlockSpec Spec(int n1, int n2, int s1, int s2, int hidden) {
  MemoryBlockSpec spec;
  spec.past_order = n1;
  spec.future_order = n2;
  spec.past_stride = s1;
  spec.future_stride = s2;
  spec.hidden_dim = hidden;
  return spec;
}

// Direct triple summation with zero padding.
Tensor NaiveMemory(const Tensor &h, const Tensor *skip, const Tensor &a, const Tensor &c,
                   const MemoryBlockSpec &spec, bool include_current) {
  const long T = static_cast<long>(h.rows()), D = static_cast<long>(h.cols());
  Tensor out({h.rows(), h.cols()});
  for (long t = 0; t < T; ++t) {
    for (long d = 0; d < D; ++d) {
      double v = skip ? skip->at(t, d) : 0.0;
      if (include_current) v += h.at(t, d);
      for (long i = 0; i <= spec.past_order; ++i) {
        long src = t - spec.past_stride * i;
        if (src >= 0 && src < T) v += a.at(i, d) * h.at(src, d);
      }
      for (long j = 0; j <= spec.future_order; ++j) {
        long src = t + spec.future_stride * j;
        if (src >= 0 && src < T) v += c.at(j, d) * h.at(src, d);
      }
      out.at(t, d) = v;
    }
  }
  return out;
}

TEST(MemoryBlockTest, ZeroTapsPassSkip) {
  Rng rng(1);
  MemoryBlockSpec spec = Spec(3, 2, 1, 2, 4);
  Tensor h = RandomTensor({6, 4}, rng), skip = RandomTensor({6, 4}, rng);
  Tensor a = Tensor::Zeros({4, 4}), c = Tensor::Zeros({3, 4});
  Tensor out = MemoryBlockForward(h, &skip, a, c, spec);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], skip[i]);
}

TEST(MemoryBlockTest, OrderZeroDoublesCurrentFrame) {
  Rng rng(2);
  MemoryBlockSpec spec = Spec(0, 0, 1, 1, 3);
  Tensor h = RandomTensor({5, 3}, rng);
  Tensor a({1, 3}), c({1, 3});
  a.Fill(1.0);
  c.Fill(1.0);
  Tensor out = MemoryBlockForward(h, nullptr, a, c, spec);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], 2.0 * h[i]);
}

TEST(MemoryBlockTest, HandWorkedExample) {
  MemoryBlockSpec spec = Spec(1, 1, 1, 1, 1);
  Tensor h = Tensor::Matrix(3, 1, {1, 2, 3});
  Tensor a = Tensor::Matrix(2, 1, {1, 1}), c = Tensor::Matrix(2, 1, {1, 1});
  Tensor skip = Tensor::Zeros({3, 1});
  Tensor out = MemoryBlockForward(h, &skip, a, c, spec);
  EXPECT_EQ(out[0], 4.0);
  EXPECT_EQ(out[1], 8.0);
  EXPECT_EQ(out[2], 8.0);
  Tensor with_current = MemoryBlockForward(h, &skip, a, c, spec, true);
  EXPECT_EQ(with_current[0], 5.0);
  EXPECT_EQ(with_current[1], 10.0);
  EXPECT_EQ(with_current[2], 11.0);
}

TEST(MemoryBlockTest, MatchesDirectSummation) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    MemoryBlockSpec spec = Spec(rng.UniformRange(0, 5), rng.UniformRange(0, 4),
                                rng.UniformRange(1, 3), rng.UniformRange(1, 3),
                                rng.UniformRange(1, 4));
    const std::size_t T = rng.UniformRange(1, 12), D = spec.hidden_dim;
    Tensor h = RandomTensor({T, D}, rng), skip = RandomTensor({T, D}, rng);
    Tensor a = RandomTensor({static_cast<std::size_t>(spec.past_order + 1), D}, rng);
    Tensor c = RandomTensor({static_cast<std::size_t>(spec.future_order + 1), D}, rng);
    const bool current = trial % 3 == 0;
    Tensor out = MemoryBlockForward(h, trial % 2 ? &skip : nullptr, a, c, spec, current);
    Tensor ref = NaiveMemory(h, trial % 2 ? &skip : nullptr, a, c, spec, current);
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(out[i], ref[i], 1e-12);
  }
}

TEST(MemoryBlockTest, GradientCheck) {
  Rng rng(4);
  for (int trial = 0; trial < 6; ++trial) {
    MemoryBlockSpec spec = Spec(rng.UniformRange(0, 4), rng.UniformRange(0, 3),
                                rng.UniformRange(1, 2), rng.UniformRange(1, 2), 3);
    const std::size_t T = rng.UniformRange(1, 9);
    const bool current = trial % 2 == 1;
    Tensor h = RandomTensor({T, 3}, rng), skip = RandomTensor({T, 3}, rng);
    Tensor a = RandomTensor({static_cast<std::size_t>(spec.past_order + 1), 3}, rng);
    Tensor c = RandomTensor({static_cast<std::size_t>(spec.future_order + 1), 3}, rng);
    Tensor proj = RandomTensor({T, 3}, rng);
    auto objective = [&] {
      Tensor out = MemoryBlockForward(h, &skip, a, c, spec, current);
      double s = 0;
      for (std::size_t i = 0; i < out.size(); ++i) s += proj[i] * out[i] * out[i];
      return s;
    };
    Tensor out = MemoryBlockForward(h, &skip, a, c, spec, current);
    for (std::size_t i = 0; i < out.size(); ++i) out.grad()[i] = 2 * proj[i] * out[i];
    MemoryBlockBackward(out, h, &skip, a, c, spec, current);
    std::vector<Tensor *> params = {&h, &skip, &a, &c};
    GradCheckReport report = GradCheck(objective, params, {});
    EXPECT_TRUE(report.pass) << report.max_rel_err << " at " << report.worst;
  }
}

TEST(MemoryBlockTest, ShapeMismatch) {
  MemoryBlockSpec spec = Spec(1, 1, 1, 1, 2);
  Tensor h = Tensor::Zeros({4, 2}), skip = Tensor::Zeros({3, 2});
  Tensor a = Tensor::Zeros({2, 2}), c = Tensor::Zeros({2, 2});
  ExpectKind(ErrorKind::kConfig, [&] { MemoryBlockForward(h, &skip, a, c, spec); });
  Tensor short_taps = Tensor::Zeros({1, 2});
  ExpectKind(ErrorKind::kConfig,
             [&] { MemoryBlockForward(h, nullptr, short_taps, c, spec); });
}

struct OwnedBlock {
  BlockConfig cfg;
  Tensor aw, ab, lw, past, future;
  BlockParams Params() { return {&aw, &ab, &lw, &past, &future}; }
};

OwnedBlock RandomBlock(Rng &rng, int in_dim, int n1, int n2) {
  OwnedBlock b;
  b.cfg.mem = Spec(n1, n2, 1, 2, 3);
  b.cfg.proj_dim = b.cfg.relu_dim = 4;
  b.aw = RandomTensor({static_cast<std::size_t>(in_dim), 4}, rng);
  b.ab = RandomTensor({4}, rng);
  b.lw = RandomTensor({4, 3}, rng);
  b.past = RandomTensor({static_cast<std::size_t>(n1 + 1), 3}, rng);
  b.future = RandomTensor({static_cast<std::size_t>(n2 + 1), 3}, rng);
  return b;
}

TEST(BlockTest, ZeroWeightsPassSkip) {
  Rng rng(5);
  OwnedBlock b = RandomBlock(rng, 5, 2, 1);
  b.aw.Fill(0);
  b.ab.Fill(0);
  b.lw.Fill(0);
  b.past.Fill(0);
  b.future.Fill(0);
  Tensor x = RandomTensor({6, 5}, rng), skip = RandomTensor({6, 3}, rng);
  BlockActivations acts = BlockForward(x, b.cfg, b.Params(), &skip);
  for (std::size_t i = 0; i < skip.size(); ++i) EXPECT_EQ(acts.out[i], skip[i]);
}

TEST(BlockTest, SingleFrameUsesOnlyCurrentTaps) {
  Rng rng(6);
  OwnedBlock b = RandomBlock(rng, 5, 4, 3);
  Tensor x = RandomTensor({1, 5}, rng);
  BlockActivations full = BlockForward(x, b.cfg, b.Params(), nullptr);
  OwnedBlock zeroed = b;
  for (std::size_t r = 1; r < zeroed.past.rows(); ++r)
    for (std::size_t d = 0; d < 3; ++d) zeroed.past.at(r, d) = 0;
  for (std::size_t r = 1; r < zeroed.future.rows(); ++r)
    for (std::size_t d = 0; d < 3; ++d) zeroed.future.at(r, d) = 0;
  BlockActivations ref = BlockForward(x, zeroed.cfg, zeroed.Params(), nullptr);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(full.out[i], ref.out[i]);
}

TEST(BlockTest, GradientCheck) {
  Rng rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    OwnedBlock b = RandomBlock(rng, 4, rng.UniformRange(0, 3), rng.UniformRange(0, 2));
    const std::size_t T = rng.UniformRange(2, 7);
    Tensor x = RandomTensor({T, 4}, rng), skip = RandomTensor({T, 3}, rng);
    Tensor proj = RandomTensor({T, 3}, rng);
    auto objective = [&] {
      BlockActivations acts = BlockForward(x, b.cfg, b.Params(), &skip);
      double s = 0;
      for (std::size_t i = 0; i < acts.out.size(); ++i) s += proj[i] * acts.out[i];
      return s;
    };
    auto signature = [&] {
      BlockActivations acts = BlockForward(x, b.cfg, b.Params(), &skip);
      std::uint64_t sig = 1469598103934665603ULL;
      for (double v : acts.affine.values()) sig = (sig ^ (v > 0)) * 1099511628211ULL;
      return sig;
    };
    BlockActivations acts = BlockForward(x, b.cfg, b.Params(), &skip);
    for (std::size_t i = 0; i < acts.out.size(); ++i) acts.out.grad()[i] = proj[i];
    BlockBackward(acts, x, b.cfg, b.Params(), &skip);
    std::vector<Tensor *> params = {&x, &skip, &b.aw, &b.ab, &b.lw, &b.past, &b.future};
    GradCheckReport report = GradCheck(objective, params, {}, signature);
    EXPECT_TRUE(report.pass) << report.max_rel_err << " at " << report.worst;
  }
}

// Front-end with every layer kept at the input resolution so a delta kernel
// reproduces its input.
FrontEndConfig FlatFrontEnd(int channels) {
  FrontEndConfig fe;
  for (int i = 0; i < kFrontEndLayers; ++i) fe.layers.push_back({i < 3 ? 5 : 3, channels, false});
  return fe;
}

struct OwnedFrontEnd {
  std::vector<Tensor> kernels, biases, projections;
  FrontEndParams Params() {
    FrontEndParams p;
    for (auto &k : kernels) p.kernels.push_back(&k);
    for (auto &b : biases) p.biases.push_back(&b);
    for (auto &q : projections) p.projections.push_back(q.empty() ? nullptr : &q);
    return p;
  }
};

OwnedFrontEnd MakeFrontEndParams(const FrontEndConfig &fe, Rng &rng) {
  OwnedFrontEnd o;
  int in = 1;
  for (const auto &layer : fe.layers) {
    const std::size_t k = layer.kernel;
    o.kernels.push_back(RandomTensor({static_cast<std::size_t>(layer.channels),
                                      static_cast<std::size_t>(in), k, k},
                                     rng, 0.3));
    o.biases.push_back(RandomTensor({static_cast<std::size_t>(layer.channels)}, rng, 0.1));
    in = layer.channels;
  }
  o.projections.resize(fe.layers.size());
  for (const auto &span : ShortcutSpans(fe)) {
    if (!span.needs_projection) continue;
    const int from = span.first == 0 ? 1 : fe.layers[span.first - 1].channels;
    o.projections[span.second] = RandomTensor(
        {static_cast<std::size_t>(fe.layers[span.second].channels),
         static_cast<std::size_t>(from), 1, 1},
        rng);
  }
  return o;
}

TEST(FrontEndTest, DeltaKernelsReproduceInput) {
  FrontEndConfig fe = FlatFrontEnd(1);
  Rng rng(8);
  OwnedFrontEnd p = MakeFrontEndParams(fe, rng);
  for (std::size_t i = 0; i < fe.layers.size(); ++i) {
    p.kernels[i].Fill(0.0);
    p.biases[i].Fill(0.0);
    const std::size_t k = fe.layers[i].kernel;
    // The layer that closes the 5->3 shortcut keeps a zero residual branch.
    if (i != 3) p.kernels[i][(k / 2) * k + k / 2] = 1.0;
  }
  Tensor features = RandomTensor({7, 10}, rng);
  for (double &v : features.values()) v = std::abs(v);
  FrontEndActivations acts = FrontEndForward(features, fe, p.Params());
  ASSERT_EQ(acts.output.shape(), features.shape());
  for (std::size_t i = 0; i < features.size(); ++i) EXPECT_EQ(acts.output[i], features[i]);
}

TEST(FrontEndTest, ZeroKernelsLeaveProjectedShortcut) {
  const int channels[] = {2, 2, 3, 3, 4, 4};
  FrontEndConfig fe = MakeFrontEnd(channels);
  Rng rng(9);
  OwnedFrontEnd p = MakeFrontEndParams(fe, rng);
  p.kernels[3].Fill(0.0);
  p.biases[3].Fill(0.0);
  Tensor features = RandomTensor({6, 16}, rng);
  FrontEndActivations acts = FrontEndForward(features, fe, p.Params());
  // Layer 4 closes the span opened at layer 3: its pre-activation is the 1x1
  // projection of layer 2's output, subsampled along frequency.
  const Tensor &src = acts.post[1];
  const Tensor &proj = p.projections[3];
  const std::size_t C = src.dim(0), T = src.dim(1), W = src.dim(2);
  const std::size_t K = proj.dim(0), OW = (W + 1) / 2;
  ASSERT_EQ(acts.pre[3].shape(), (Shape{K, T, OW}));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t j = 0; j < OW; ++j) {
        double s = 0;
        for (std::size_t c = 0; c < C; ++c) s += proj[k * C + c] * src[(c * T + t) * W + 2 * j];
        EXPECT_NEAR(acts.pre[3][(k * T + t) * OW + j], s, 1e-12);
      }
}

TEST(FrontEndTest, KeepsFrameCount) {
  const int channels[] = {3, 3, 5, 5, 6, 6};
  FrontEndConfig fe = MakeFrontEnd(channels);
  Rng rng(10);
  OwnedFrontEnd p = MakeFrontEndParams(fe, rng);
  Tensor features = RandomTensor({7, 12}, rng);
  FrontEndActivations acts = FrontEndForward(features, fe, p.Params());
  // Frequency: 12 -> 6 -> 3 -> 2.
  EXPECT_EQ(acts.output.shape(), (Shape{7, 6 * 2}));
}

TEST(FrontEndTest, FeatureDimTooSmall) {
  FrontEndConfig fe = MakeFrontEnd(std::vector<int>{1, 1, 1, 1, 1, 1});
  EXPECT_EQ(MinFeatureDim(fe), 8);
  Rng rng(11);
  OwnedFrontEnd p = MakeFrontEndParams(fe, rng);
  Tensor features = Tensor::Zeros({4, 5});
  try {
    FrontEndForward(features, fe, p.Params());
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(std::string(e.what()).find("minimal F is 8"), std::string::npos);
  }
}

NetworkConfig SmallConfig(int blocks, bool front_end) {
  NetworkConfig cfg;
  cfg.input_dim = 8;
  cfg.output_dim = 4;
  if (front_end) cfg.front_end = MakeFrontEnd(std::vector<int>{2, 2, 3, 3, 3, 4});
  std::vector<int> orders, strides;
  for (int l = 0; l < blocks; ++l) {
    orders.push_back(1 + l / 2);
    strides.push_back(l < 2 ? 1 : 2);
  }
  cfg.blocks = MakeBlocks(orders, strides, 4, 3, Architecture::kPyramidal);
  return cfg;
}

TEST(NetworkTest, ZeroEverythingGivesZeroOutput) {
  Network net(DeskPreset(8, 10));
  for (auto &t : net.params()) t.Fill(0.0);
  Tensor features = Tensor::Zeros({5, 8});
  NetworkActivations acts = net.Forward(features);
  for (double v : acts.chain_output.values()) EXPECT_EQ(v, 0.0);
  for (double v : acts.xent_logits.values()) EXPECT_EQ(v, 0.0);
}

TEST(NetworkTest, InputDimMismatch) {
  Network net(DeskPreset(8, 10));
  ExpectKind(ErrorKind::kConfig, [&] { net.Forward(Tensor::Zeros({5, 9})); });
}

TEST(NetworkTest, TwoBlockDeskGradientCheck) {
  NetworkConfig cfg = DeskPreset(8, 6);
  cfg.blocks.resize(2);
  AssignSkipJunctions(cfg.blocks, Architecture::kPyramidal);
  Network net(cfg);
  Rng rng(12);
  net.Initialize(rng);
  Tensor features = RandomTensor({5, 8}, rng);
  Tensor p1 = RandomTensor({5, 6}, rng), p2 = RandomTensor({5, 6}, rng);
  auto objective = [&] {
    NetworkActivations acts = net.Forward(features);
    double s = 0;
    for (std::size_t i = 0; i < p1.size(); ++i)
      s += p1[i] * acts.chain_output[i] + p2[i] * acts.xent_log_probs[i];
    return s;
  };
  net.ZeroGrad();
  NetworkActivations acts = net.Forward(features);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    acts.chain_output.grad()[i] = p1[i];
    acts.xent_log_probs.grad()[i] = p2[i];
  }
  net.Backward(acts);
  auto signature = [&] { return Network::ReluSignature(net.Forward(features)); };
  GradCheckOptions opts;
  opts.eps = 1e-3;
  opts.five_point = true;
  opts.tol = 1e-5;
  opts.max_coords_per_tensor = 40;
  std::vector<Tensor *> params = net.ParamPointers();
  GradCheckReport report = GradCheck(objective, params, opts, signature);
  EXPECT_TRUE(report.pass) << report.max_rel_err << " at " << report.worst;
  EXPECT_GT(report.checked, 100u);
}

TEST(ReceptiveFieldTest, Arithmetic) {
  NetworkConfig cfg;
  cfg.input_dim = 2;
  cfg.output_dim = 2;
  BlockConfig b;
  b.mem = Spec(4, 0, 2, 1, 2);
  b.proj_dim = b.relu_dim = 2;
  cfg.blocks = {b};
  ReceptiveField rf = ComputeReceptiveField(cfg);
  EXPECT_EQ(rf.past, 8);
  EXPECT_EQ(rf.future, 0);
  cfg.blocks.push_back(b);
  rf = ComputeReceptiveField(cfg);
  EXPECT_EQ(rf.past, 16);
  EXPECT_EQ(rf.future, 0);
}

TEST(ReceptiveFieldTest, Presets) {
  ReceptiveField desk = ComputeReceptiveField(DeskPreset(8, 10));
  // Front-end 3 * 2 + 3 * 1; blocks 2+2+4+4*2+6*2+6*2 and 1+1+2+2*2+3*2+3*2.
  EXPECT_EQ(desk.past, 9 + 40);
  EXPECT_EQ(desk.future, 9 + 20);
  ReceptiveField paper = ComputeReceptiveField(PaperPreset(40, 10));
  EXPECT_EQ(paper.past, 9 + 4 + 4 + 8 + 8 + 12 + 24 + 32 + 32 + 40 + 40);
  EXPECT_EQ(paper.future, 9 + 2 + 2 + 4 + 4 + 6 + 12 + 16 + 16 + 20 + 20);
}

// Outputs at frame t must be bitwise invariant to input frames outside
// [t - past, t + future]; the extreme frames must still be reachable.
void CheckCausality(const NetworkConfig &cfg, std::uint64_t seed) {
  Network net(cfg);
  Rng rng(seed);
  net.Initialize(rng);
  const ReceptiveField rf = ComputeReceptiveField(cfg);
  const int T = rf.past + rf.future + 6;
  Tensor features = RandomTensor({static_cast<std::size_t>(T),
                                  static_cast<std::size_t>(cfg.input_dim)},
                                 rng);
  const Tensor base = net.Forward(features).chain_output;
  for (int t0 : {0, T / 2, T - 1}) {
    Tensor moved = features;
    for (int f = 0; f < cfg.input_dim; ++f) moved.at(t0, f) += 3.0 + f;
    const Tensor out = net.Forward(moved).chain_output;
    for (int t = 0; t < T; ++t) {
      bool same = true;
      for (int k = 0; k < cfg.output_dim; ++k) same &= out.at(t, k) == base.at(t, k);
      const bool inside = t0 >= t - rf.past && t0 <= t + rf.future;
      if (!inside) {
        EXPECT_TRUE(same) << "t=" << t << " t0=" << t0;
      }
    }
  }
}

TEST(ReceptiveFieldTest, PerturbationRespectsBound) {
  CheckCausality(SmallConfig(3, false), 13);
  CheckCausality(SmallConfig(4, true), 14);
  CheckCausality(DeskPreset(8, 10), 15);
}

TEST(ReceptiveFieldTest, MonotoneWithDepth) {
  for (const NetworkConfig &cfg : {DeskPreset(8, 10), PaperPreset(40, 10)}) {
    ReceptiveField prev = ComputeReceptiveField(cfg, 0);
    for (std::size_t k = 1; k <= cfg.blocks.size(); ++k) {
      ReceptiveField rf = ComputeReceptiveField(cfg, k);
      EXPECT_GE(rf.past, prev.past);
      EXPECT_GE(rf.future, prev.future);
      prev = rf;
    }
  }
}

TEST(ConfigTest, PaperPresetSchedule) {
  NetworkConfig cfg = PaperPreset(40, 100);
  ASSERT_EQ(cfg.blocks.size(), 10u);
  const int orders[] = {4, 4, 8, 8, 12, 12, 16, 16, 20, 20};
  const int strides[] = {1, 1, 1, 1, 1, 2, 2, 2, 2, 2};
  for (std::size_t l = 0; l < 10; ++l) {
    EXPECT_EQ(cfg.blocks[l].mem.past_order, orders[l]);
    EXPECT_EQ(cfg.blocks[l].mem.future_order, orders[l] / 2);
    EXPECT_EQ(cfg.blocks[l].mem.past_stride, strides[l]);
    EXPECT_EQ(cfg.blocks[l].mem.hidden_dim, 1536);
    EXPECT_EQ(cfg.blocks[l].proj_dim, 256);
    EXPECT_EQ(cfg.blocks[l].mem.skip_depth, l >= 2 && l % 2 == 0 ? 2 : 0);
  }
  EXPECT_NO_THROW(Validate(cfg));
}

TEST(ConfigTest, SkipJunctionsFollowOrderChanges) {
  for (const NetworkConfig &cfg : {DeskPreset(8, 10), PaperPreset(40, 10), SmallConfig(5, false)}) {
    int changes = 0;
    for (std::size_t l = 1; l < cfg.blocks.size(); ++l) {
      const auto &a = cfg.blocks[l - 1].mem, &b = cfg.blocks[l].mem;
      changes += a.past_order != b.past_order || a.future_order != b.future_order;
    }
    EXPECT_EQ(CountSkipJunctions(cfg), changes);
  }
}

TEST(ConfigTest, DfsmnSkipsEveryBlock) {
  NetworkConfig cfg = DeskPreset(8, 10);
  AssignSkipJunctions(cfg.blocks, Architecture::kDfsmn);
  EXPECT_EQ(cfg.blocks[0].mem.skip_depth, 0);
  for (std::size_t l = 1; l < cfg.blocks.size(); ++l) EXPECT_EQ(cfg.blocks[l].mem.skip_depth, 1);
}

TEST(ConfigTest, ValidationErrors) {
  NetworkConfig cfg = DeskPreset(8, 10);
  cfg.blocks[2].mem.past_order = 1;
  ExpectKind(ErrorKind::kConfig, [&] { Validate(cfg); });
  cfg = DeskPreset(8, 10);
  cfg.front_end.layers[0].subsample = true;
  ExpectKind(ErrorKind::kConfig, [&] { Validate(cfg); });
  cfg = DeskPreset(4, 10);
  ExpectKind(ErrorKind::kConfig, [&] { Validate(cfg); });
  cfg = DeskPreset(8, 10);
  cfg.blocks[1].mem.skip_depth = 3;
  ExpectKind(ErrorKind::kConfig, [&] { Validate(cfg); });
}

TEST(ConfigTest, JsonRoundTrip) {
  for (NetworkConfig cfg : {DeskPreset(8, 10), PaperPreset(40, 30)}) {
    NetworkConfig back = NetworkConfigFromJson(ToJson(cfg));
    EXPECT_EQ(ToJson(back), ToJson(cfg));
    EXPECT_EQ(ConfigHash(back), ConfigHash(cfg));
  }
  NetworkConfig a = DeskPreset(8, 10), b = DeskPreset(8, 11);
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
}

TEST(ParamCountTest, SingleAffine) {
  NetworkConfig cfg;
  cfg.input_dim = 2;
  cfg.output_dim = 3;
  // Two heads of 2 x 3 + 3 each.
  EXPECT_EQ(ParamCount(cfg), 2u * 9u);
}

TEST(ParamCountTest, DeskHandCount) {
  // conv: out * in * k * k + out
  const std::size_t conv = (8 * 1 * 25 + 8) + (8 * 8 * 25 + 8) + (16 * 8 * 25 + 16) +
                           (16 * 16 * 9 + 16) + (32 * 16 * 9 + 32) + (32 * 32 * 9 + 32);
  const std::size_t shortcut = 16 * 8;
  auto block = [](std::size_t in, std::size_t n1, std::size_t n2) {
    return in * 32 + 32 + 32 * 96 + (n1 + 1) * 96 + (n2 + 1) * 96;
  };
  const std::size_t blocks = block(32, 2, 1) + block(96, 2, 1) + block(96, 4, 2) +
                             block(96, 4, 2) + block(96, 6, 3) + block(96, 6, 3);
  const std::size_t heads = 2 * (96 * 10 + 10);
  EXPECT_EQ(ParamCount(DeskPreset(8, 10)), conv + shortcut + blocks + heads);
  EXPECT_EQ(ParamCount(DeskPreset(8, 10)), 62924u);
  EXPECT_EQ(Network(DeskPreset(8, 10)).NumParams(), 62924u);
}

TEST(ParamCountTest, PyramidalBeatsUniform) {
  NetworkConfig pyramidal = PaperPreset(40, 100);
  NetworkConfig uniform = pyramidal;
  for (auto &b : uniform.blocks) {
    b.mem.past_order = 20;
    b.mem.future_order = 10;
  }
  uniform.preset = "custom";
  EXPECT_LT(ParamCount(pyramidal), ParamCount(uniform));
}

TEST(CheckpointTest, RoundTrip) {
  NetworkConfig cfg = SmallConfig(3, true);
  Network net(cfg);
  Rng rng(16);
  net.Initialize(rng);
  std::stringstream ss;
  SaveCheckpoint(ss, net, {{"note", "x"}});
  LoadedCheckpoint loaded = LoadCheckpoint(ss, cfg);
  EXPECT_EQ(loaded.extras["note"], "x");
  ASSERT_EQ(loaded.network.params().size(), net.params().size());
  for (std::size_t p = 0; p < net.params().size(); ++p) {
    const Tensor &a = net.params()[p], &b = loaded.network.params()[p];
    ASSERT_EQ(a.shape(), b.shape());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  }
}

TEST(CheckpointTest, HashMismatch) {
  NetworkConfig cfg = SmallConfig(2, false);
  Network net(cfg);
  std::stringstream ss;
  SaveCheckpoint(ss, net);
  NetworkConfig other = SmallConfig(3, false);
  ExpectKind(ErrorKind::kConfig, [&] { LoadCheckpoint(ss, other); });
  std::stringstream garbage("not a checkpoint");
  ExpectKind(ErrorKind::kFormat, [&] { LoadCheckpoint(garbage); });
}

TEST(CheckpointTest, TamperedHeaderDetected) {
  NetworkConfig cfg = SmallConfig(2, false);
  Network net(cfg);
  std::stringstream ss;
  SaveCheckpoint(ss, net);
  std::string bytes = ss.str();
  const std::size_t pos = bytes.find("\"output_dim\":4");
  ASSERT_NE(pos, std::string::npos);
  bytes[pos + 13] = '5';
  std::stringstream tampered(bytes);
  ExpectKind(ErrorKind::kFormat, [&] { LoadCheckpoint(tampered); });
}

}  // namespace
}  // namespace pfsmn
