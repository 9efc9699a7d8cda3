// tests/unit/numeric_test.cc

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
#include <cstdint>
#include <cstring>
#include <limits>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "pfsmn/error.h"
#include "pfsmn/numeric/grad_check.h"
#include "pfsmn/numeric/ops.h"
#include "pfsmn/numeric/rng.h"
#include "pfsmn/numeric/tensor.h"
#include "pfsmn/numeric/tensor_io.h"
#include "test_util.h"

namespace pfsmn {
namespace {

using testing_util::ExpectKind;
using testing_util::RandomTensor;

// Independent transcription of the documented generator.
struct ReferenceRng {
  std::uint64_t state;
  explicit ReferenceRng(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    state = z ^ (z >> 31);
    if (state == 0) state = 1;
  }
  std::uint64_t Next() {
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    return state * 0x2545F4914F6CDD1DULL;
  }
};

TEST(RngTest, MatchesReferenceStream) {
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xFFFFFFFFFFFFFFFFULL}) {
    Rng rng(seed);
    ReferenceRng ref(seed);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(rng.NextU64(), ref.Next()) << seed;
  }
}

TEST(RngTest, DerivedDrawsAreInRange) {
  Rng rng(7);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) {
    double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    int k = rng.UniformRange(-2, 2);
    ASSERT_GE(k, -2);
    ASSERT_LE(k, 2);
    ++counts[k + 2];
  }
  for (int c : counts) EXPECT_NEAR(c / 50000.0, 0.2, 0.01);
}

TEST(RngTest, NormalMoments) {
  Rng rng(3);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double z = rng.Normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(RngTest, ShuffleIsPermutationAndDeterministic) {
  std::vector<int> a(20), b;
  for (int i = 0; i < 20; ++i) a[i] = i;
  b = a;
  Rng r1(9), r2(9);
  r1.Shuffle(a);
  r2.Shuffle(b);
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(AffineTest, ZeroInputPassesBias) {
  Tensor x = Tensor::Zeros({3, 4});
  Rng rng(1);
  Tensor w = RandomTensor({4, 2}, rng);
  Tensor b({2}, {1.0, 2.0});
  Tensor out = Affine(x, w, b);
  for (std::size_t t = 0; t < 3; ++t) {
    EXPECT_EQ(out.at(t, 0), 1.0);
    EXPECT_EQ(out.at(t, 1), 2.0);
  }
}

TEST(AffineTest, IdentityWeights) {
  Rng rng(2);
  Tensor x = RandomTensor({5, 3}, rng);
  Tensor w = Tensor::Zeros({3, 3});
  for (int i = 0; i < 3; ++i) w.at(i, i) = 1.0;
  Tensor out = Affine(x, w, Tensor::Zeros({3}));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(out[i], x[i]);
}

TEST(AffineTest, HandExpandedExample) {
  Tensor x = Tensor::Matrix(1, 2, {1, 2});
  Tensor w = Tensor::Matrix(2, 2, {1, 0, 0, 1});
  Tensor b({2}, {3, 4});
  Tensor out = Affine(x, w, b);
  EXPECT_EQ(out.at(0, 0), 4.0);
  EXPECT_EQ(out.at(0, 1), 6.0);
  for (double &g : out.grad()) g = 1.0;
  AffineBackward(out, x, w, b);
  std::vector<double> expected = {1, 1, 2, 2};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(w.grad()[i], expected[i]);
  EXPECT_EQ(b.grad()[0], 1.0);
  EXPECT_EQ(b.grad()[1], 1.0);
  EXPECT_EQ(x.grad()[0], 1.0);
  EXPECT_EQ(x.grad()[1], 1.0);
}

TEST(AffineTest, ShapeMismatchNamesShapes) {
  Tensor x = Tensor::Zeros({2, 3});
  Tensor w = Tensor::Zeros({4, 2});
  try {
    Affine(x, w, Tensor::Zeros({2}));
    FAIL() << "expected an error";
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    std::string msg = e.what();
    EXPECT_NE(msg.find(ShapeToString(x.shape())), std::string::npos) << msg;
    EXPECT_NE(msg.find(ShapeToString(w.shape())), std::string::npos) << msg;
  }
}

TEST(AffineTest, GradientCheck) {
  Rng rng(11);
  Tensor x = RandomTensor({4, 3}, rng);
  Tensor w = RandomTensor({3, 5}, rng);
  Tensor b = RandomTensor({5}, rng);
  Tensor proj = RandomTensor({4, 5}, rng);
  auto objective = [&] {
    Tensor out = Affine(x, w, b);
    double s = 0;
    for (std::size_t i = 0; i < out.size(); ++i) s += proj[i] * out[i];
    return s;
  };
  Tensor out = Affine(x, w, b);
  for (std::size_t i = 0; i < out.size(); ++i) out.grad()[i] = proj[i];
  AffineBackward(out, x, w, b);
  std::vector<Tensor *> params = {&x, &w, &b};
  GradCheckReport report = GradCheck(objective, params, {});
  EXPECT_TRUE(report.pass) << report.max_rel_err << " at " << report.worst;
}

TEST(ReluTest, Definition) {
  Tensor x({3}, {-1, 0, 2});
  Tensor out = Relu(x);
  EXPECT_EQ(out[0], 0.0);
  EXPECT_EQ(out[1], 0.0);
  EXPECT_EQ(out[2], 2.0);
}

TEST(ReluTest, PositiveInputIsIdentity) {
  Tensor x({4}, {0.5, 1, 2, 3});
  Tensor out = Relu(x);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(out[i], x[i]);
}

TEST(ReluTest, SubgradientChoice) {
  Tensor x({3}, {-1, 2, 0});
  Tensor out = Relu(x);
  out.grad()[0] = 5;
  out.grad()[1] = 7;
  out.grad()[2] = 9;
  ReluBackward(out, x);
  EXPECT_EQ(x.grad()[0], 0.0);
  EXPECT_EQ(x.grad()[1], 7.0);
  EXPECT_EQ(x.grad()[2], 0.0);
}

// Direct nested-loop cross-correlation with zero padding.
Tensor NaiveConv(const Tensor &x, const Tensor &k, std::size_t sh, std::size_t sw,
                 bool same) {
  const long C = x.dim(0), H = x.dim(1), W = x.dim(2);
  const long K = k.dim(0), kh = k.dim(2), kw = k.dim(3);
  long oh, ow, pt, pl;
  if (same) {
    oh = (H + sh - 1) / sh;
    ow = (W + sw - 1) / sw;
    pt = (kh - 1) / 2;
    pl = (kw - 1) / 2;
  } else {
    oh = (H - kh) / sh + 1;
    ow = (W - kw) / sw + 1;
    pt = pl = 0;
  }
  Tensor out({static_cast<std::size_t>(K), static_cast<std::size_t>(oh),
              static_cast<std::size_t>(ow)});
  for (long f = 0; f < K; ++f)
    for (long i = 0; i < oh; ++i)
      for (long j = 0; j < ow; ++j) {
        double s = 0;
        for (long c = 0; c < C; ++c)
          for (long r = 0; r < kh; ++r)
            for (long q = 0; q < kw; ++q) {
              long row = i * sh + r - pt, col = j * sw + q - pl;
              if (row < 0 || row >= H || col < 0 || col >= W) continue;
              s += x[(c * H + row) * W + col] * k[((f * C + c) * kh + r) * kw + q];
            }
        out[(f * oh + i) * ow + j] = s;
      }
  return out;
}

TEST(Conv2dTest, IdentityKernel) {
  Rng rng(4);
  Tensor x = RandomTensor({1, 5, 6}, rng);
  Tensor k({1, 1, 1, 1}, {1.0});
  Tensor out = Conv2d(x, k, nullptr, {});
  ASSERT_EQ(out.shape(), x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(out[i], x[i]);
}

TEST(Conv2dTest, ZeroKernels) {
  Rng rng(5);
  Tensor x = RandomTensor({2, 4, 4}, rng);
  Tensor k = Tensor::Zeros({3, 2, 3, 3});
  Tensor out = Conv2d(x, k, nullptr, {});
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(Conv2dTest, OnesValid) {
  Tensor x({1, 3, 3});
  x.Fill(1.0);
  Tensor k({1, 1, 3, 3});
  k.Fill(1.0);
  Conv2dOptions opts;
  opts.padding = Padding::kValid;
  Tensor out = Conv2d(x, k, nullptr, opts);
  ASSERT_EQ(out.shape(), (Shape{1, 1, 1}));
  EXPECT_EQ(out[0], 9.0);
}

TEST(Conv2dTest, MatchesNaiveOracle) {
  Rng rng(6);
  for (int trial = 0; trial < 24; ++trial) {
    std::size_t C = rng.UniformRange(1, 3), K = rng.UniformRange(1, 3);
    std::size_t kh = rng.UniformRange(0, 2) * 2 + 1, kw = rng.UniformRange(0, 2) * 2 + 1;
    std::size_t H = rng.UniformRange(static_cast<int>(kh), 9);
    std::size_t W = rng.UniformRange(static_cast<int>(kw), 9);
    Conv2dOptions opts;
    opts.stride_h = rng.UniformRange(1, 2);
    opts.stride_w = rng.UniformRange(1, 2);
    opts.padding = trial % 2 ? Padding::kSame : Padding::kValid;
    Tensor x = RandomTensor({C, H, W}, rng);
    Tensor k = RandomTensor({K, C, kh, kw}, rng);
    Tensor out = Conv2d(x, k, nullptr, opts);
    Tensor ref = NaiveConv(x, k, opts.stride_h, opts.stride_w,
                           opts.padding == Padding::kSame);
    ASSERT_EQ(out.shape(), ref.shape());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(out[i], ref[i], 1e-12);
  }
}

TEST(Conv2dTest, BiasIsAddedPerFilter) {
  Rng rng(8);
  Tensor x = RandomTensor({1, 4, 4}, rng);
  Tensor k = RandomTensor({2, 1, 3, 3}, rng);
  Tensor bias({2}, {0.5, -1.5});
  Tensor with = Conv2d(x, k, &bias, {});
  Tensor without = Conv2d(x, k, nullptr, {});
  for (std::size_t f = 0; f < 2; ++f)
    for (std::size_t i = 0; i < 16; ++i)
      EXPECT_NEAR(with[f * 16 + i], without[f * 16 + i] + bias[f], 1e-12);
}

TEST(Conv2dTest, KernelLargerThanValidInput) {
  Tensor x = Tensor::Zeros({1, 2, 2});
  Tensor k = Tensor::Zeros({1, 1, 3, 3});
  Conv2dOptions opts;
  opts.padding = Padding::kValid;
  ExpectKind(ErrorKind::kConfig, [&] { Conv2d(x, k, nullptr, opts); });
}

TEST(Conv2dTest, GradientCheck) {
  Rng rng(12);
  for (int trial = 0; trial < 4; ++trial) {
    Conv2dOptions opts;
    opts.stride_w = 1 + trial % 2;
    opts.padding = trial < 2 ? Padding::kSame : Padding::kValid;
    Tensor x = RandomTensor({2, 6, 7}, rng);
    Tensor k = RandomTensor({3, 2, 3, 5}, rng);
    Tensor bias = RandomTensor({3}, rng);
    Tensor probe = Conv2d(x, k, &bias, opts);
    Tensor proj = RandomTensor(probe.shape(), rng);
    auto objective = [&] {
      Tensor out = Conv2d(x, k, &bias, opts);
      double s = 0;
      for (std::size_t i = 0; i < out.size(); ++i) s += proj[i] * out[i];
      return s;
    };
    Tensor out = Conv2d(x, k, &bias, opts);
    for (std::size_t i = 0; i < out.size(); ++i) out.grad()[i] = proj[i];
    Conv2dBackward(out, x, k, &bias, opts);
    std::vector<Tensor *> params = {&x, &k, &bias};
    GradCheckReport report = GradCheck(objective, params, {});
    EXPECT_TRUE(report.pass) << report.max_rel_err << " at " << report.worst;
  }
}

TEST(LogSoftmaxTest, RowsNormalize) {
  Rng rng(13);
  Tensor x = RandomTensor({6, 7}, rng, 30.0);
  Tensor out = LogSoftmax(x);
  for (std::size_t t = 0; t < 6; ++t) {
    double s = 0;
    for (std::size_t k = 0; k < 7; ++k) s += std::exp(out.at(t, k));
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(LogSoftmaxTest, ShiftInvariantAndStable) {
  Tensor x = Tensor::Matrix(1, 3, {1000, 1001, 1002});
  Tensor y = Tensor::Matrix(1, 3, {0, 1, 2});
  Tensor ox = LogSoftmax(x), oy = LogSoftmax(y);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(ox[k], oy[k], 1e-12);
  EXPECT_TRUE(ox.AllFinite());
}

TEST(LogSoftmaxTest, GradientCheck) {
  Rng rng(14);
  Tensor x = RandomTensor({3, 5}, rng);
  Tensor proj = RandomTensor({3, 5}, rng);
  auto objective = [&] {
    Tensor out = LogSoftmax(x);
    double s = 0;
    for (std::size_t i = 0; i < out.size(); ++i) s += proj[i] * out[i];
    return s;
  };
  Tensor out = LogSoftmax(x);
  for (std::size_t i = 0; i < out.size(); ++i) out.grad()[i] = proj[i];
  LogSoftmaxBackward(out, x);
  std::vector<Tensor *> params = {&x};
  GradCheckReport report = GradCheck(objective, params, {});
  EXPECT_TRUE(report.pass) << report.max_rel_err;
}

TEST(LogSumExpTest, Basics) {
  std::vector<double> v = {std::log(1.0), std::log(2.0), std::log(3.0)};
  EXPECT_NEAR(LogSumExp(v), std::log(6.0), 1e-14);
  double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> empty_mass = {ninf, ninf};
  EXPECT_EQ(LogSumExp(empty_mass), ninf);
  EXPECT_NEAR(LogAdd(std::log(0.25), std::log(0.75)), 0.0, 1e-15);
  EXPECT_EQ(LogAdd(ninf, 1.5), 1.5);
}

TEST(GradCheckTest, DetectsWrongGradient) {
  Tensor p({2}, {0.3, -0.7});
  auto objective = [&] { return p[0] * p[0] + 3 * p[1]; };
  p.grad()[0] = 2 * 0.3;
  p.grad()[1] = 3.5;
  std::vector<Tensor *> params = {&p};
  GradCheckReport report = GradCheck(objective, params, {});
  EXPECT_FALSE(report.pass);
  EXPECT_EQ(report.worst, "tensor#0[1]");
  EXPECT_NEAR(report.max_rel_err, 0.5 / 6.5, 1e-6);
}

TEST(GradCheckTest, FivePointIsExactOnQuartic) {
  Tensor p({1}, {0.4});
  auto objective = [&] { return std::pow(p[0], 4); };
  p.grad()[0] = 4 * std::pow(0.4, 3);
  std::vector<Tensor *> params = {&p};
  GradCheckOptions opts;
  opts.eps = 1e-2;
  opts.five_point = true;
  opts.tol = 1e-10;
  EXPECT_TRUE(GradCheck(objective, params, opts).pass);
  opts.five_point = false;
  EXPECT_FALSE(GradCheck(objective, params, opts).pass);
}

TEST(GradCheckTest, KinkSignatureExcludesCoordinate) {
  Tensor p({2}, {1e-6, 2.0});
  auto objective = [&] { return std::abs(p[0]) + p[1] * p[1]; };
  p.grad()[0] = 1.0;
  p.grad()[1] = 4.0;
  auto signature = [&] { return static_cast<std::uint64_t>(p[0] > 0); };
  std::vector<Tensor *> params = {&p};
  GradCheckReport report = GradCheck(objective, params, {}, signature);
  EXPECT_EQ(report.excluded, 1u);
  EXPECT_EQ(report.checked, 1u);
  EXPECT_TRUE(report.pass);
}

TEST(GradCheckTest, NonFiniteObjectiveFails) {
  Tensor p({1}, {0.0});
  auto objective = [&] { return p[0] > 0 ? std::log(-1.0) : 0.0; };
  p.grad()[0] = 0.0;
  std::vector<Tensor *> params = {&p};
  GradCheckReport report = GradCheck(objective, params, {});
  EXPECT_FALSE(report.pass);
  EXPECT_FALSE(report.failure.empty());
}

TEST(TensorIoTest, RoundTripIsExact) {
  Rng rng(15);
  Tensor t = RandomTensor({2, 3, 4}, rng);
  t[5] = -0.0;
  t[6] = 1e-308;
  std::stringstream ss;
  WriteTensor(ss, t);
  Tensor back = ReadTensor(ss);
  ASSERT_EQ(back.shape(), t.shape());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(std::memcmp(&back[i], &t[i], sizeof(double)), 0);
  }
}

TEST(TensorIoTest, ByteLayout) {
  Tensor t({1}, {1.0});
  std::stringstream ss;
  WriteTensor(ss, t);
  std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 4u + 4u + 8u + 8u);
  EXPECT_EQ(bytes.substr(0, 4), "PFT1");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 1);
  // 1.0 = 0x3FF0000000000000, little-endian.
  EXPECT_EQ(static_cast<unsigned char>(bytes[22]), 0xF0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[23]), 0x3F);
}

TEST(TensorIoTest, MalformedInput) {
  std::stringstream bad_magic("XXXX");
  ExpectKind(ErrorKind::kFormat, [&] { ReadTensor(bad_magic); });
  Tensor t({3}, {1, 2, 3});
  std::stringstream ss;
  WriteTensor(ss, t);
  std::string bytes = ss.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  ExpectKind(ErrorKind::kFormat, [&] { ReadTensor(truncated); });
  ExpectKind(ErrorKind::kIo, [&] { ReadTensorFile("/nonexistent/dir/t.pft"); });
}

}  // namespace
}  // namespace pfsmn
