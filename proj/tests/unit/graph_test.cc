// tests/unit/graph_test.cc

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

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "pfsmn/error.h"
#include "pfsmn/graph/graph.h"
#include "pfsmn/graph/phone_lm.h"
#include "pfsmn/graph/topology.h"
#include "pfsmn/numeric/ops.h"
#include "pfsmn/numeric/rng.h"
#include "test_util.h"

namespace pfsmn {
namespace {

using testing_util::ExpectKind;
using WeightedPath = std::pair<std::vector<int>, double>;

const double kWa = std::log(1.0 / 3.0);
const double kWb = std::log(1.0 / 2.0);

// Every way to realize `phones` as HMM tokens over exactly T frames, scored
// independently of the graph code: LM score plus per-token transition weights.
void ExpandTokens(const std::vector<int> &phones, int T, std::size_t i,
                  std::vector<int> &pdfs, double weight, std::vector<WeightedPath> &out) {
  if (i == phones.size()) {
    if (static_cast<int>(pdfs.size()) == T) out.push_back({pdfs, weight});
    return;
  }
  const int left = T - static_cast<int>(pdfs.size());
  const int rest = static_cast<int>(phones.size() - i - 1);
  for (int a = 1; a + rest <= left; ++a) {
    for (int b = 0; a + b + rest <= left; ++b) {
      double w = (a - 1) * kWa + (b > 0 ? kWa + (b - 1) * kWb + kWb : kWa);
      const std::size_t mark = pdfs.size();
      pdfs.insert(pdfs.end(), a, 2 * phones[i]);
      pdfs.insert(pdfs.end(), b, 2 * phones[i] + 1);
      ExpandTokens(phones, T, i + 1, pdfs, weight + w, out);
      pdfs.resize(mark);
    }
  }
}

std::vector<WeightedPath> OracleNumerator(const std::vector<int> &phones, int T,
                                          const PhoneLm *lm) {
  std::vector<WeightedPath> out;
  std::vector<int> pdfs;
  ExpandTokens(phones, T, 0, pdfs, lm ? lm->ScoreSequence(phones) : 0.0, out);
  return out;
}

std::vector<WeightedPath> OracleDenominator(const PhoneLm &lm, int T) {
  std::vector<WeightedPath> out;
  std::vector<int> phones;
  std::function<void()> grow = [&] {
    if (!phones.empty()) {
      auto part = OracleNumerator(phones, T, &lm);
      out.insert(out.end(), part.begin(), part.end());
    }
    if (static_cast<int>(phones.size()) == T) return;
    for (int p = 0; p < lm.num_phones(); ++p) {
      phones.push_back(p);
      grow();
      phones.pop_back();
    }
  };
  grow();
  return out;
}

std::vector<WeightedPath> FromGraph(const Graph &g, int T) {
  std::vector<WeightedPath> out;
  for (const PathEntry &p : EnumeratePaths(g, T, 1000000)) out.push_back({p.pdfs, p.weight});
  return out;
}

void ExpectSamePaths(std::vector<WeightedPath> a, std::vector<WeightedPath> b) {
  auto less = [](const WeightedPath &x, const WeightedPath &y) {
    if (x.first != y.first) return x.first < y.first;
    return x.second < y.second;
  };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].first, b[i].first);
    EXPECT_NEAR(a[i].second, b[i].second, 1e-12);
  }
}

TEST(TopologyTest, PhoneHmmShape) {
  Graph g = BuildPhoneHmm(2, 4);
  EXPECT_EQ(g.num_states, 3);
  EXPECT_EQ(g.arcs.size(), 4u);
  EXPECT_EQ(g.finals.size(), 2u);
  std::vector<int> pdfs;
  for (const Arc &a : g.arcs) pdfs.push_back(a.pdf);
  std::sort(pdfs.begin(), pdfs.end());
  pdfs.erase(std::unique(pdfs.begin(), pdfs.end()), pdfs.end());
  EXPECT_EQ(pdfs, (std::vector<int>{4, 5}));
  ExpectKind(ErrorKind::kConfig, [] { BuildPhoneHmm(4, 4); });
}

TEST(TopologyTest, PhoneHmmPathCounts) {
  Graph g = BuildPhoneHmm(0, 1);
  EXPECT_EQ(EnumeratePaths(g, 1, 100).size(), 1u);
  auto paths = EnumeratePaths(g, 3, 100);
  ASSERT_EQ(paths.size(), 3u);
  std::vector<std::vector<int>> seqs;
  for (const auto &p : paths) seqs.push_back(p.pdfs);
  std::sort(seqs.begin(), seqs.end());
  EXPECT_EQ(seqs, (std::vector<std::vector<int>>{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}}));
}

TEST(TopologyTest, OutgoingWeightsNormalize) {
  Graph g = BuildPhoneHmm(0, 1);
  std::vector<double> mass(g.num_states, 0.0);
  for (const Arc &a : g.arcs) mass[a.src] += std::exp(a.weight);
  for (const FinalWeight &f : g.finals) mass[f.state] += std::exp(f.weight);
  for (int s = 1; s < g.num_states; ++s) EXPECT_NEAR(mass[s], 1.0, 1e-15);
}

TEST(NumeratorTest, SmallCases) {
  std::vector<int> one = {3};
  EXPECT_EQ(EnumeratePaths(BuildNumeratorGraph(one, 1, 4), 1, 100).size(), 1u);
  std::vector<int> two = {1, 2};
  EXPECT_EQ(EnumeratePaths(BuildNumeratorGraph(two, 2, 4), 2, 100).size(), 1u);
  // sum over d1 + d2 = 4 of d1 * d2 state splits
  EXPECT_EQ(EnumeratePaths(BuildNumeratorGraph(two, 4, 4), 4, 100).size(), 10u);
}

TEST(NumeratorTest, MatchesTokenOracle) {
  Rng rng(1);
  std::vector<std::vector<int>> corpus = {{0, 1, 2}, {2, 2, 1}, {1, 0}};
  PhoneLm lm = PhoneLm::Estimate(corpus, 3, 2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> phones(rng.UniformRange(1, 3));
    for (int &p : phones) p = rng.UniformRange(0, 2);
    const int T = static_cast<int>(phones.size()) + rng.UniformRange(0, 4);
    const PhoneLm *use_lm = trial % 2 ? &lm : nullptr;
    ExpectSamePaths(FromGraph(BuildNumeratorGraph(phones, T, 3, use_lm), T),
                    OracleNumerator(phones, T, use_lm));
  }
}

TEST(NumeratorTest, TooFewFrames) {
  std::vector<int> phones = {0, 1, 0};
  ExpectKind(ErrorKind::kInfeasible, [&] { BuildNumeratorGraph(phones, 2, 2); });
}

TEST(DenominatorTest, SinglePhoneUnigram) {
  PhoneLm lm = PhoneLm::Uniform(1);
  auto paths = FromGraph(BuildDenominatorGraph(lm, 2), 2);
  ExpectSamePaths(paths, OracleDenominator(lm, 2));
  // A A (one token), A B (one token), A | A (two tokens)
  EXPECT_EQ(paths.size(), 3u);
}

TEST(DenominatorTest, SingleFrameUniform) {
  PhoneLm lm = PhoneLm::Uniform(4);
  auto paths = FromGraph(BuildDenominatorGraph(lm, 1), 1);
  ASSERT_EQ(paths.size(), 4u);
  for (const auto &p : paths) EXPECT_NEAR(p.second, std::log(0.25) + kWa, 1e-14);
}

TEST(DenominatorTest, MatchesTokenOracle) {
  std::vector<std::vector<int>> corpus = {{0, 1, 2, 1}, {2, 0}, {1, 1, 0}};
  for (int order = 1; order <= 3; ++order) {
    PhoneLm lm = PhoneLm::Estimate(corpus, 3, order);
    for (int T = 1; T <= 4; ++T) {
      ExpectSamePaths(FromGraph(BuildDenominatorGraph(lm, T), T), OracleDenominator(lm, T));
    }
  }
}

TEST(DenominatorTest, ContainsNumeratorPaths) {
  std::vector<std::vector<int>> corpus = {{0, 1, 2, 1}, {2, 0}, {1, 1, 0}};
  PhoneLm lm = PhoneLm::Estimate(corpus, 3, 3);
  const int T = 5;
  auto den = FromGraph(BuildDenominatorGraph(lm, T), T);
  std::vector<int> phones = {2, 1, 0};
  for (const auto &path : FromGraph(BuildNumeratorGraph(phones, T, 3, &lm), T)) {
    auto it = std::find_if(den.begin(), den.end(), [&](const WeightedPath &d) {
      return d.first == path.first && std::abs(d.second - path.second) < 1e-12;
    });
    EXPECT_NE(it, den.end());
  }
}

TEST(DenominatorTest, EmptyVocabulary) {
  ExpectKind(ErrorKind::kConfig, [] { PhoneLm::Uniform(0); });
}

TEST(PhoneLmTest, AddKByHand) {
  std::vector<std::vector<int>> corpus = {{0, 1}, {0, 0}};
  PhoneLm lm = PhoneLm::Estimate(corpus, 2, 2, 0.1);
  // After <s>: phone 0 twice.
  PhoneLm::History start = lm.StartContext();
  EXPECT_EQ(start, (PhoneLm::History{PhoneLm::kSentenceStart}));
  EXPECT_NEAR(lm.LogProb(start, 0), std::log(2.1 / 2.2), 1e-14);
  EXPECT_NEAR(lm.LogProb(start, 1), std::log(0.1 / 2.2), 1e-14);
  // After 0: one 1, one 0.
  EXPECT_NEAR(lm.LogProb({0}, 1), std::log(1.1 / 2.2), 1e-14);
  // History 1 was never followed by anything: backs off to the unigram.
  EXPECT_EQ(lm.Resolve({1}), PhoneLm::History{});
  EXPECT_NEAR(lm.LogProb(lm.Resolve({1}), 0), std::log(3.1 / 4.2), 1e-14);
  EXPECT_NEAR(lm.ScoreSequence(std::vector<int>{0, 1}),
              std::log(2.1 / 2.2) + std::log(1.1 / 2.2), 1e-14);
}

TEST(PhoneLmTest, ContextsNormalize) {
  Rng rng(2);
  std::vector<std::vector<int>> corpus(40);
  for (auto &s : corpus) {
    s.resize(rng.UniformRange(1, 8));
    for (int &p : s) p = rng.UniformRange(0, 4);
  }
  for (int order = 1; order <= 4; ++order) {
    PhoneLm lm = PhoneLm::Estimate(corpus, 5, order);
    for (const auto &[history, logp] : lm.contexts()) {
      EXPECT_LE(static_cast<int>(history.size()), order - 1);
      EXPECT_NEAR(std::exp(LogSumExp(logp)), 1.0, 1e-9);
    }
  }
}

TEST(PhoneLmTest, JsonRoundTrip) {
  std::vector<std::vector<int>> corpus = {{0, 1, 2}, {2, 1}};
  PhoneLm lm = PhoneLm::Estimate(corpus, 3, 3);
  PhoneLm back = PhoneLm::FromJson(lm.ToJson());
  EXPECT_EQ(back.ToJson(), lm.ToJson());
  EXPECT_EQ(back.ScoreSequence(std::vector<int>{2, 1, 0}),
            lm.ScoreSequence(std::vector<int>{2, 1, 0}));
}

TEST(PhoneLmTest, InvalidInputs) {
  std::vector<std::vector<int>> bad = {{0, 3}};
  ExpectKind(ErrorKind::kConfig, [&] { PhoneLm::Estimate(bad, 3, 2); });
  std::vector<std::vector<int>> ok = {{0}};
  ExpectKind(ErrorKind::kConfig, [&] { PhoneLm::Estimate(ok, 3, 0); });
}

TEST(CollapseTest, PdfsToPhones) {
  EXPECT_EQ(PdfsToPhones(std::vector<int>{0, 0, 1, 2, 3, 3}), (std::vector<int>{0, 1}));
  // Entry pdf after the B state starts a new token of the same phone.
  EXPECT_EQ(PdfsToPhones(std::vector<int>{0, 1, 0}), (std::vector<int>{0, 0}));
  // Repeated entry pdf collapses.
  EXPECT_EQ(PdfsToPhones(std::vector<int>{4, 4, 4}), (std::vector<int>{2}));
  EXPECT_TRUE(PdfsToPhones(std::vector<int>{}).empty());
}

TEST(CollapseTest, AlignmentRoundTrip) {
  std::vector<int> phones = {1, 0, 2}, a = {2, 1, 1}, b = {1, 0, 3};
  std::vector<int> align = AlignmentFromDurations(phones, a, b);
  EXPECT_EQ(align, (std::vector<int>{2, 2, 3, 0, 4, 5, 5, 5}));
  EXPECT_EQ(PdfsToPhones(align), phones);
}

Graph RandomDag(Rng &rng, int layers, int width) {
  Graph g;
  g.start = g.AddState();
  std::vector<std::vector<int>> layer_states = {{g.start}};
  for (int l = 1; l <= layers; ++l) {
    std::vector<int> states;
    for (int k = 0; k < width; ++k) states.push_back(g.AddState());
    for (int s : states) {
      for (int src : layer_states.back()) {
        if (rng.Uniform() < 0.6) g.AddArc(src, s, rng.UniformRange(0, 3), rng.Uniform(-2, 0));
      }
    }
    layer_states.push_back(states);
  }
  for (int s : layer_states.back()) {
    if (rng.Uniform() < 0.7) g.SetFinal(s, rng.Uniform(-1, 0));
  }
  // A dangling state off the start.
  int dangling = g.AddState();
  g.AddArc(g.start, dangling, 0, 0.0);
  return g;
}

TEST(TrimTest, RemovesDanglingState) {
  Graph g;
  g.start = g.AddState();
  int a = g.AddState(), dead = g.AddState();
  g.AddArc(0, a, 0, -0.5);
  g.AddArc(0, dead, 1, -0.1);
  g.SetFinal(a, 0.0);
  Graph t = Trim(g);
  EXPECT_EQ(t.num_states, 2);
  EXPECT_EQ(t.arcs.size(), 1u);
  Graph again = Trim(t);
  EXPECT_EQ(GraphToText(again), GraphToText(t));
}

TEST(TrimTest, PreservesPathWeights) {
  Rng rng(3);
  int tested = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = RandomDag(rng, 4, 3);
    std::vector<WeightedPath> before = FromGraph(g, 4);
    if (before.empty()) {
      ExpectKind(ErrorKind::kEmptyGraph, [&] { Trim(g); });
      continue;
    }
    Graph t = Trim(g);
    ExpectSamePaths(before, FromGraph(t, 4));
    ++tested;
  }
  EXPECT_GT(tested, 20);
}

TEST(UnrollTest, IsTopologicallySortable) {
  PhoneLm lm = PhoneLm::Uniform(3);
  Graph compact = BuildCompactDenominator(lm);
  EXPECT_FALSE(TopologicalOrder(compact).has_value());
  Graph g = BuildDenominatorGraph(lm, 6);
  EXPECT_TRUE(TopologicalOrder(g).has_value());
  EXPECT_FALSE(g.HasEpsilon());
}

TEST(UnrollTest, PreservesPathsOfLengthT) {
  PhoneLm lm = PhoneLm::Estimate(std::vector<std::vector<int>>{{0, 1, 1}, {1, 0}}, 2, 2);
  Graph compact = BuildCompactDenominator(lm);
  for (int T = 1; T <= 4; ++T) ExpectSamePaths(FromGraph(compact, T), FromGraph(Unroll(compact, T), T));
}

TEST(EnumerateTest, DiamondAndLimit) {
  Graph g;
  g.start = g.AddState();
  int a = g.AddState(), b = g.AddState(), c = g.AddState();
  g.AddArc(0, a, 0, -1.0);
  g.AddArc(0, b, 1, -1.0);
  g.AddArc(a, c, 2, -0.5);
  g.AddArc(b, c, 2, -0.5);
  g.SetFinal(c, 0.0);
  auto paths = EnumeratePaths(g, 2, 10);
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(paths[0].weight, paths[1].weight);
  ExpectKind(ErrorKind::kLimitExceeded, [&] { EnumeratePaths(g, 2, 1); });
  ExpectKind(ErrorKind::kLimitExceeded, [] {
    EnumeratePaths(BuildDenominatorGraph(PhoneLm::Uniform(5), 8), 8, 1000);
  });
}

TEST(GraphTextTest, RoundTripIsExact) {
  PhoneLm lm = PhoneLm::Estimate(std::vector<std::vector<int>>{{0, 1, 2}}, 3, 2);
  Graph g = BuildDenominatorGraph(lm, 3);
  std::stringstream ss;
  WriteGraphText(ss, g);
  Graph back = ReadGraphText(ss);
  EXPECT_EQ(back.num_states, g.num_states);
  EXPECT_EQ(back.start, g.start);
  ASSERT_EQ(back.arcs.size(), g.arcs.size());
  for (std::size_t i = 0; i < g.arcs.size(); ++i) {
    EXPECT_EQ(back.arcs[i].src, g.arcs[i].src);
    EXPECT_EQ(back.arcs[i].dst, g.arcs[i].dst);
    EXPECT_EQ(back.arcs[i].pdf, g.arcs[i].pdf);
    EXPECT_EQ(back.arcs[i].weight, g.arcs[i].weight);
  }
  EXPECT_EQ(GraphToText(back), GraphToText(g));
}

TEST(GraphTextTest, Malformed) {
  std::stringstream bad("PFG2 3 0\n");
  ExpectKind(ErrorKind::kFormat, [&] { ReadGraphText(bad); });
  std::stringstream out_of_range("PFG1 2 0\n0 5 1 0.0\n");
  EXPECT_THROW(ReadGraphText(out_of_range), Error);
}

}  // namespace
}  // namespace pfsmn
