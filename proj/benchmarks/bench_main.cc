// benchmarks/bench_main.cc

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

#include <benchmark/benchmark.h>

#include "pfsmn/graph/phone_lm.h"
#include "pfsmn/graph/topology.h"
#include "pfsmn/loss/chain_loss.h"
#include "pfsmn/loss/forward_backward.h"
#include "pfsmn/net/config.h"
#include "pfsmn/net/network.h"
#include "pfsmn/numeric/ops.h"
#include "pfsmn/numeric/rng.h"
#include "pfsmn/train/corpus.h"

namespace pfsmn {
namespace {

Tensor RandomMatrix(std::size_t rows, std::size_t cols, Rng &rng) {
  Tensor t({rows, cols});
  for (double &v : t.values()) v = rng.Uniform(-1.0, 1.0);
  return t;
}

PhoneLm DeskLm(int order) {
  return PhoneLm::Estimate(Transcripts(GenerateCorpus(GeneratorSpec(), 500)), 5, order);
}

// Denominator forward-backward over T frames with the 4-gram desk LM.
void BM_DenominatorForwardBackward(benchmark::State &state) {
  const int T = static_cast<int>(state.range(0));
  static const PhoneLm lm = DeskLm(4);
  FrameGraph den(BuildDenominatorGraph(lm, T));
  Rng rng(1);
  Tensor loglik = RandomMatrix(static_cast<std::size_t>(T), 10, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ForwardBackward(den, loglik, 1.0).total_logprob);
  }
  state.counters["states"] = den.num_states();
  state.counters["frames/s"] = benchmark::Counter(T, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_DenominatorForwardBackward)->Arg(20)->Arg(40)->Arg(80);

void BM_DenominatorUnroll(benchmark::State &state) {
  static const PhoneLm lm = DeskLm(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BuildDenominatorGraph(lm, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_DenominatorUnroll)->Arg(40);

void BM_LfmmiLoss(benchmark::State &state) {
  const int T = 40;
  static const PhoneLm lm = DeskLm(4);
  FrameGraph den(BuildDenominatorGraph(lm, T));
  FrameGraph num(BuildNumeratorGraph(std::vector<int>{0, 3, 1, 4, 2}, T, 5, &lm));
  Rng rng(2);
  Tensor loglik = RandomMatrix(T, 10, rng);
  for (auto _ : state) benchmark::DoNotOptimize(LfmmiLoss(num, den, loglik).value);
}
BENCHMARK(BM_LfmmiLoss);

void BM_NetworkForward(benchmark::State &state) {
  Network net(DeskPreset(8, 10));
  Rng rng(3);
  net.Initialize(rng);
  Tensor features = RandomMatrix(static_cast<std::size_t>(state.range(0)), 8, rng);
  for (auto _ : state) benchmark::DoNotOptimize(net.Forward(features).chain_output.data());
  state.counters["frames/s"] =
      benchmark::Counter(static_cast<double>(state.range(0)),
                         benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_NetworkForward)->Arg(20)->Arg(40);

void BM_NetworkForwardBackward(benchmark::State &state) {
  Network net(DeskPreset(8, 10));
  Rng rng(4);
  net.Initialize(rng);
  Tensor features = RandomMatrix(40, 8, rng);
  for (auto _ : state) {
    NetworkActivations acts = net.Forward(features);
    acts.chain_output.grad()[0] = 1.0;
    acts.xent_logits.grad()[0] = 1.0;
    net.Backward(acts);
  }
}
BENCHMARK(BM_NetworkForwardBackward);

void BM_Conv2d(benchmark::State &state) {
  const std::size_t C = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  Tensor x({C, 40, 8});
  for (double &v : x.values()) v = rng.Uniform(-1.0, 1.0);
  Tensor k({2 * C, C, 3, 3});
  for (double &v : k.values()) v = rng.Uniform(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(Conv2d(x, k, nullptr, {}).data());
}
BENCHMARK(BM_Conv2d)->Arg(8)->Arg(16);

}  // namespace
}  // namespace pfsmn

BENCHMARK_MAIN();
