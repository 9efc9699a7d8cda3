// ops.cc

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

#include "pfsmn/numeric/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfsmn/error.h"

namespace pfsmn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void RequireRank(const Tensor &t, std::size_t rank, const char *what) {
  if (t.rank() != rank) {
    Fail(ErrorKind::kConfig, std::string(what) + " must have rank " +
                                 std::to_string(rank) + ", got shape " +
                                 ShapeToString(t.shape()));
  }
}

void RequireMatmulShapes(const Tensor &x, const Tensor &w, const char *op) {
  RequireRank(x, 2, "input");
  RequireRank(w, 2, "weight");
  if (x.cols() != w.rows()) {
    Fail(ErrorKind::kConfig, std::string(op) + ": input shape " +
                                 ShapeToString(x.shape()) +
                                 " does not conform to weight shape " +
                                 ShapeToString(w.shape()));
  }
}

// out += x * w, i-k-j loop order for contiguous inner access.
void GemmAccumulate(const Tensor &x, const Tensor &w, Tensor &out) {
  const std::size_t rows = x.rows(), inner = x.cols(), cols = w.cols();
  const double *xd = x.data();
  const double *wd = w.data();
  double *od = out.data();
  for (std::size_t t = 0; t < rows; ++t) {
    double *orow = od + t * cols;
    for (std::size_t i = 0; i < inner; ++i) {
      const double xv = xd[t * inner + i];
      if (xv == 0.0) continue;
      const double *wrow = wd + i * cols;
      for (std::size_t j = 0; j < cols; ++j) orow[j] += xv * wrow[j];
    }
  }
}

void MatMulBackwardImpl(std::span<const double> dout, Tensor &x, Tensor &w) {
  const std::size_t rows = x.rows(), inner = x.cols(), cols = w.cols();
  std::span<double> dx = x.grad();
  std::span<double> dw = w.grad();
  const double *xd = x.data();
  const double *wd = w.data();
  for (std::size_t t = 0; t < rows; ++t) {
    const double *drow = dout.data() + t * cols;
    for (std::size_t i = 0; i < inner; ++i) {
      const double *wrow = wd + i * cols;
      double *dwrow = dw.data() + i * cols;
      const double xv = xd[t * inner + i];
      double acc = 0.0;
      for (std::size_t j = 0; j < cols; ++j) {
        acc += drow[j] * wrow[j];
        dwrow[j] += xv * drow[j];
      }
      dx[t * inner + i] += acc;
    }
  }
}

std::size_t OutputExtent(std::size_t in, std::size_t kernel, std::size_t stride,
                         Padding padding) {
  if (padding == Padding::kSame) return (in + stride - 1) / stride;
  return (in - kernel) / stride + 1;
}

struct ConvGeometry {
  std::size_t channels, height, width;
  std::size_t filters, kh, kw;
  std::size_t out_h, out_w;
  long pad_top, pad_left;
};

ConvGeometry CheckConv(const Tensor &x, const Tensor &kernels, const Tensor *bias,
                       const Conv2dOptions &opts) {
  RequireRank(x, 3, "conv2d input");
  RequireRank(kernels, 4, "conv2d kernels");
  ConvGeometry g{};
  g.channels = x.dim(0);
  g.height = x.dim(1);
  g.width = x.dim(2);
  g.filters = kernels.dim(0);
  g.kh = kernels.dim(2);
  g.kw = kernels.dim(3);
  if (kernels.dim(1) != g.channels) {
    Fail(ErrorKind::kConfig, "conv2d: input shape " + ShapeToString(x.shape()) +
                                 " does not match kernel shape " +
                                 ShapeToString(kernels.shape()));
  }
  if (g.kh % 2 == 0 || g.kw % 2 == 0) {
    Fail(ErrorKind::kConfig, "conv2d: kernel extents must be odd, got " +
                                 ShapeToString(kernels.shape()));
  }
  auto valid_stride = [](std::size_t s) { return s == 1 || s == 2; };
  if (!valid_stride(opts.stride_h) || !valid_stride(opts.stride_w)) {
    Fail(ErrorKind::kConfig, "conv2d: strides must be 1 or 2");
  }
  if (bias != nullptr && (bias->rank() != 1 || bias->dim(0) != g.filters)) {
    Fail(ErrorKind::kConfig, "conv2d: bias shape " + ShapeToString(bias->shape()) +
                                 " does not match " + std::to_string(g.filters) +
                                 " filters");
  }
  if (opts.padding == Padding::kValid && (g.kh > g.height || g.kw > g.width)) {
    Fail(ErrorKind::kConfig, "conv2d: kernel " + ShapeToString(kernels.shape()) +
                                 " is larger than the unpadded input " +
                                 ShapeToString(x.shape()));
  }
  g.out_h = OutputExtent(g.height, g.kh, opts.stride_h, opts.padding);
  g.out_w = OutputExtent(g.width, g.kw, opts.stride_w, opts.padding);
  g.pad_top = opts.padding == Padding::kSame ? static_cast<long>(g.kh - 1) / 2 : 0;
  g.pad_left = opts.padding == Padding::kSame ? static_cast<long>(g.kw - 1) / 2 : 0;
  return g;
}

// Output columns j with 0 <= j * stride + s - pad < width.
void ColumnRange(const ConvGeometry &g, std::size_t stride, long s,
                 std::size_t *lo, std::size_t *hi) {
  const long offset = s - g.pad_left;
  const long st = static_cast<long>(stride);
  long first = offset >= 0 ? 0 : (-offset + st - 1) / st;
  long last_excl = (static_cast<long>(g.width) - offset + st - 1) / st;
  last_excl = std::min<long>(last_excl, static_cast<long>(g.out_w));
  *lo = static_cast<std::size_t>(std::max<long>(first, 0));
  *hi = static_cast<std::size_t>(std::max<long>(last_excl, first));
}

}  // namespace

double LogSumExp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - m);
  return m + std::log(sum);
}

double LogAdd(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

Tensor Affine(const Tensor &x, const Tensor &w, const Tensor &b) {
  RequireMatmulShapes(x, w, "affine");
  if (b.rank() != 1 || b.dim(0) != w.cols()) {
    Fail(ErrorKind::kConfig, "affine: bias shape " + ShapeToString(b.shape()) +
                                 " does not conform to weight shape " +
                                 ShapeToString(w.shape()));
  }
  Tensor out({x.rows(), w.cols()});
  for (std::size_t t = 0; t < x.rows(); ++t) {
    std::copy(b.values().begin(), b.values().end(),
              out.values().begin() + static_cast<long>(t * w.cols()));
  }
  GemmAccumulate(x, w, out);
  return out;
}

void AffineBackward(const Tensor &out, Tensor &x, Tensor &w, Tensor &b) {
  if (!out.has_grad()) return;
  std::span<const double> dout = out.grad();
  MatMulBackwardImpl(dout, x, w);
  std::span<double> db = b.grad();
  const std::size_t cols = w.cols();
  for (std::size_t t = 0; t < out.rows(); ++t) {
    for (std::size_t j = 0; j < cols; ++j) db[j] += dout[t * cols + j];
  }
}

Tensor MatMul(const Tensor &x, const Tensor &w) {
  RequireMatmulShapes(x, w, "matmul");
  Tensor out({x.rows(), w.cols()});
  GemmAccumulate(x, w, out);
  return out;
}

void MatMulBackward(const Tensor &out, Tensor &x, Tensor &w) {
  if (!out.has_grad()) return;
  MatMulBackwardImpl(out.grad(), x, w);
}

Tensor Relu(const Tensor &x) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
  return out;
}

void ReluBackward(const Tensor &out, Tensor &x) {
  if (!out.has_grad()) return;
  std::span<const double> dout = out.grad();
  std::span<double> dx = x.grad();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) dx[i] += dout[i];
  }
}

Tensor Conv2d(const Tensor &x, const Tensor &kernels, const Tensor *bias,
              const Conv2dOptions &opts) {
  const ConvGeometry g = CheckConv(x, kernels, bias, opts);
  Tensor out({g.filters, g.out_h, g.out_w});
  const double *xd = x.data();
  const double *kd = kernels.data();
  double *od = out.data();
  const std::size_t out_plane = g.out_h * g.out_w;
  for (std::size_t k = 0; k < g.filters; ++k) {
    double *oplane = od + k * out_plane;
    if (bias != nullptr) std::fill(oplane, oplane + out_plane, (*bias)[k]);
    for (std::size_t c = 0; c < g.channels; ++c) {
      const double *xplane = xd + c * g.height * g.width;
      for (std::size_t r = 0; r < g.kh; ++r) {
        for (std::size_t s = 0; s < g.kw; ++s) {
          const double kv = kd[((k * g.channels + c) * g.kh + r) * g.kw + s];
          if (kv == 0.0) continue;
          std::size_t jlo, jhi;
          ColumnRange(g, opts.stride_w, static_cast<long>(s), &jlo, &jhi);
          for (std::size_t i = 0; i < g.out_h; ++i) {
            const long row = static_cast<long>(i * opts.stride_h + r) - g.pad_top;
            if (row < 0 || row >= static_cast<long>(g.height)) continue;
            const double *xrow = xplane + static_cast<std::size_t>(row) * g.width;
            double *orow = oplane + i * g.out_w;
            for (std::size_t j = jlo; j < jhi; ++j) {
              const std::size_t col = j * opts.stride_w + s - static_cast<std::size_t>(g.pad_left);
              orow[j] += kv * xrow[col];
            }
          }
        }
      }
    }
  }
  return out;
}

void Conv2dBackward(const Tensor &out, Tensor &x, Tensor &kernels, Tensor *bias,
                    const Conv2dOptions &opts) {
  if (!out.has_grad()) return;
  const ConvGeometry g = CheckConv(x, kernels, bias, opts);
  std::span<const double> dout = out.grad();
  std::span<double> dx = x.grad();
  std::span<double> dk = kernels.grad();
  const double *xd = x.data();
  const double *kd = kernels.data();
  const std::size_t out_plane = g.out_h * g.out_w;
  if (bias != nullptr) {
    std::span<double> db = bias->grad();
    for (std::size_t k = 0; k < g.filters; ++k) {
      double acc = 0.0;
      for (std::size_t p = 0; p < out_plane; ++p) acc += dout[k * out_plane + p];
      db[k] += acc;
    }
  }
  for (std::size_t k = 0; k < g.filters; ++k) {
    const double *dplane = dout.data() + k * out_plane;
    for (std::size_t c = 0; c < g.channels; ++c) {
      const std::size_t in_off = c * g.height * g.width;
      for (std::size_t r = 0; r < g.kh; ++r) {
        for (std::size_t s = 0; s < g.kw; ++s) {
          const std::size_t kidx = ((k * g.channels + c) * g.kh + r) * g.kw + s;
          const double kv = kd[kidx];
          std::size_t jlo, jhi;
          ColumnRange(g, opts.stride_w, static_cast<long>(s), &jlo, &jhi);
          double kacc = 0.0;
          for (std::size_t i = 0; i < g.out_h; ++i) {
            const long row = static_cast<long>(i * opts.stride_h + r) - g.pad_top;
            if (row < 0 || row >= static_cast<long>(g.height)) continue;
            const std::size_t row_off = in_off + static_cast<std::size_t>(row) * g.width;
            const double *drow = dplane + i * g.out_w;
            for (std::size_t j = jlo; j < jhi; ++j) {
              const std::size_t col = j * opts.stride_w + s - static_cast<std::size_t>(g.pad_left);
              kacc += drow[j] * xd[row_off + col];
              dx[row_off + col] += drow[j] * kv;
            }
          }
          dk[kidx] += kacc;
        }
      }
    }
  }
}

Tensor LogSoftmax(const Tensor &x) {
  RequireRank(x, 2, "log_softmax input");
  Tensor out(x.shape());
  const std::size_t cols = x.cols();
  for (std::size_t t = 0; t < x.rows(); ++t) {
    std::span<const double> row = x.values().subspan(t * cols, cols);
    const double lse = LogSumExp(row);
    for (std::size_t k = 0; k < cols; ++k) out.at(t, k) = row[k] - lse;
  }
  return out;
}

void LogSoftmaxBackward(const Tensor &out, Tensor &x) {
  if (!out.has_grad()) return;
  std::span<const double> dout = out.grad();
  std::span<double> dx = x.grad();
  const std::size_t cols = x.cols();
  for (std::size_t t = 0; t < x.rows(); ++t) {
    double total = 0.0;
    for (std::size_t k = 0; k < cols; ++k) total += dout[t * cols + k];
    for (std::size_t k = 0; k < cols; ++k) {
      dx[t * cols + k] += dout[t * cols + k] - std::exp(out.at(t, k)) * total;
    }
  }
}

}  // namespace pfsmn
