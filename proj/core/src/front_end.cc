// front_end.cc

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

#include "pfsmn/net/front_end.h"

#include "pfsmn/error.h"
#include "pfsmn/numeric/ops.h"

namespace pfsmn {

namespace {

Conv2dOptions LayerOptions(const ConvLayerSpec &layer) {
  Conv2dOptions opts;
  opts.stride_h = 1;
  opts.stride_w = layer.subsample ? 2 : 1;
  opts.padding = Padding::kSame;
  return opts;
}

Conv2dOptions ProjectionOptions(const FrontEndConfig &cfg, const ShortcutSpan &span) {
  Conv2dOptions opts;
  const bool strided = cfg.layers[static_cast<std::size_t>(span.first)].subsample ||
                       cfg.layers[static_cast<std::size_t>(span.second)].subsample;
  opts.stride_w = strided ? 2 : 1;
  return opts;
}

Tensor &LayerInput(FrontEndActivations &acts, std::size_t layer) {
  return layer == 0 ? acts.input_map : acts.post[layer - 1];
}

void AddInto(Tensor &dst, const Tensor &src) {
  if (dst.shape() != src.shape()) {
    Fail(ErrorKind::kConfig, "front-end shortcut shape " + ShapeToString(src.shape()) +
                                 " does not match " + ShapeToString(dst.shape()));
  }
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

FrontEndActivations FrontEndForward(const Tensor &features, const FrontEndConfig &cfg,
                                    const FrontEndParams &params) {
  if (features.rank() != 2) {
    Fail(ErrorKind::kConfig, "front-end expects T x F features, got " +
                                 ShapeToString(features.shape()));
  }
  const int min_dim = MinFeatureDim(cfg);
  if (static_cast<int>(features.cols()) < min_dim) {
    Fail(ErrorKind::kConfig, "feature dim F=" + std::to_string(features.cols()) +
                                 " is too small for the front-end; minimal F is " +
                                 std::to_string(min_dim));
  }
  FrontEndActivations acts;
  acts.input_map = Tensor({1, features.rows(), features.cols()},
                          std::vector<double>(features.values().begin(),
                                              features.values().end()));
  const std::size_t n = cfg.layers.size();
  acts.pre.resize(n);
  acts.post.resize(n);
  acts.shortcut.resize(n);
  const auto spans = ShortcutSpans(cfg);
  for (std::size_t i = 0; i < n; ++i) {
    acts.pre[i] = Conv2d(LayerInput(acts, i), *params.kernels[i], params.biases[i],
                         LayerOptions(cfg.layers[i]));
    for (const auto &span : spans) {
      if (static_cast<std::size_t>(span.second) != i) continue;
      const Tensor &source = LayerInput(acts, static_cast<std::size_t>(span.first));
      if (span.needs_projection) {
        acts.shortcut[i] = Conv2d(source, *params.projections[i], nullptr,
                                  ProjectionOptions(cfg, span));
      } else {
        acts.shortcut[i] = source;
        acts.shortcut[i].ClearGrad();
      }
      AddInto(acts.pre[i], acts.shortcut[i]);
    }
    acts.post[i] = Relu(acts.pre[i]);
  }

  const Tensor &last = n == 0 ? acts.input_map : acts.post.back();
  const std::size_t channels = last.dim(0), frames = last.dim(1), width = last.dim(2);
  acts.output = Tensor({frames, channels * width});
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t f = 0; f < width; ++f) {
        acts.output.at(t, c * width + f) = last[(c * frames + t) * width + f];
      }
    }
  }
  return acts;
}

void FrontEndBackward(FrontEndActivations &acts, const FrontEndConfig &cfg,
                      const FrontEndParams &params) {
  if (!acts.output.has_grad()) return;
  const std::size_t n = cfg.layers.size();
  Tensor &last = n == 0 ? acts.input_map : acts.post.back();
  const std::size_t channels = last.dim(0), frames = last.dim(1), width = last.dim(2);
  {
    std::span<const double> dout = acts.output.grad();
    std::span<double> dlast = last.grad();
    const std::size_t cols = channels * width;
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t t = 0; t < frames; ++t) {
        for (std::size_t f = 0; f < width; ++f) {
          dlast[(c * frames + t) * width + f] += dout[t * cols + c * width + f];
        }
      }
    }
  }
  const auto spans = ShortcutSpans(cfg);
  for (std::size_t k = n; k-- > 0;) {
    ReluBackward(acts.post[k], acts.pre[k]);
    Conv2dBackward(acts.pre[k], LayerInput(acts, k), *params.kernels[k], params.biases[k],
                   LayerOptions(cfg.layers[k]));
    for (const auto &span : spans) {
      if (static_cast<std::size_t>(span.second) != k) continue;
      Tensor &source = LayerInput(acts, static_cast<std::size_t>(span.first));
      Tensor &shortcut = acts.shortcut[k];
      std::span<const double> dpre = acts.pre[k].grad();
      std::span<double> dshort = shortcut.grad();
      for (std::size_t i = 0; i < dshort.size(); ++i) dshort[i] += dpre[i];
      if (span.needs_projection) {
        Conv2dBackward(shortcut, source, *params.projections[k], nullptr,
                       ProjectionOptions(cfg, span));
      } else {
        std::span<double> dsource = source.grad();
        for (std::size_t i = 0; i < dsource.size(); ++i) dsource[i] += dshort[i];
      }
    }
  }
}

}  // namespace pfsmn
