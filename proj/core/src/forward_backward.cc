// forward_backward.cc

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

#include "pfsmn/loss/forward_backward.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfsmn/error.h"

namespace pfsmn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Max-shifted log-sum-exp over a scratch buffer.
double LogSumExpScratch(const std::vector<double> &v, std::size_t n) {
  double m = kNegInf;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
  if (m == kNegInf) return kNegInf;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(v[i] - m);
  return m + std::log(sum);
}

void BuildCsr(const Graph &g, bool by_dst, std::vector<int> *offsets,
              std::vector<int> *list) {
  const std::size_t n = static_cast<std::size_t>(g.num_states);
  offsets->assign(n + 1, 0);
  for (const auto &arc : g.arcs) ++(*offsets)[static_cast<std::size_t>(by_dst ? arc.dst : arc.src) + 1];
  for (std::size_t s = 0; s < n; ++s) (*offsets)[s + 1] += (*offsets)[s];
  list->assign(g.arcs.size(), 0);
  std::vector<int> fill(offsets->begin(), offsets->end() - 1);
  for (std::size_t a = 0; a < g.arcs.size(); ++a) {
    const int key = by_dst ? g.arcs[a].dst : g.arcs[a].src;
    (*list)[static_cast<std::size_t>(fill[static_cast<std::size_t>(key)]++)] = static_cast<int>(a);
  }
}

}  // namespace

FrameGraph::FrameGraph(Graph g) : graph_(std::move(g)) {
  CheckGraph(graph_);
  if (graph_.num_states == 0) Fail(ErrorKind::kEmptyGraph, "forward-backward on an empty graph");
  if (graph_.HasEpsilon()) {
    Fail(ErrorKind::kConfig, "forward-backward needs an epsilon-free graph");
  }
  auto order = TopologicalOrder(graph_);
  if (!order) {
    Fail(ErrorKind::kConfig, "forward-backward needs an unrolled (acyclic) graph");
  }
  order_ = std::move(*order);
  const std::size_t n = static_cast<std::size_t>(graph_.num_states);
  BuildCsr(graph_, true, &in_offsets_, &in_list_);
  BuildCsr(graph_, false, &out_offsets_, &out_list_);

  frame_.assign(n, -1);
  frame_[static_cast<std::size_t>(graph_.start)] = 0;
  for (int s : order_) {
    const int t = frame_[static_cast<std::size_t>(s)];
    if (t < 0) continue;  // unreachable from start
    for (int a : out_arcs(s)) {
      const int d = graph_.arcs[static_cast<std::size_t>(a)].dst;
      int &fd = frame_[static_cast<std::size_t>(d)];
      if (fd < 0) {
        fd = t + 1;
      } else if (fd != t + 1) {
        Fail(ErrorKind::kConfig, "graph is not time-synchronous: state " +
                                     std::to_string(d) + " is reached at frames " +
                                     std::to_string(fd) + " and " + std::to_string(t + 1));
      }
    }
  }
  final_.assign(n, kNegInf);
  is_final_.assign(n, 0);
  frames_ = -1;
  for (const auto &f : graph_.finals) {
    const int t = frame_[static_cast<std::size_t>(f.state)];
    if (t < 0) continue;
    if (frames_ >= 0 && t != frames_) {
      Fail(ErrorKind::kConfig, "final states at different frames (" + std::to_string(frames_) +
                                   " and " + std::to_string(t) + ")");
    }
    frames_ = t;
    final_[static_cast<std::size_t>(f.state)] = f.weight;
    is_final_[static_cast<std::size_t>(f.state)] = 1;
  }
  if (frames_ < 0) Fail(ErrorKind::kInfeasible, "graph has no reachable final state");
}

std::span<const int> FrameGraph::in_arcs(int state) const {
  const auto s = static_cast<std::size_t>(state);
  return std::span<const int>(in_list_).subspan(
      static_cast<std::size_t>(in_offsets_[s]),
      static_cast<std::size_t>(in_offsets_[s + 1] - in_offsets_[s]));
}

std::span<const int> FrameGraph::out_arcs(int state) const {
  const auto s = static_cast<std::size_t>(state);
  return std::span<const int>(out_list_).subspan(
      static_cast<std::size_t>(out_offsets_[s]),
      static_cast<std::size_t>(out_offsets_[s + 1] - out_offsets_[s]));
}

std::vector<double> ArcScores(const FrameGraph &fg, const Tensor &loglik, double scale) {
  if (loglik.rank() != 2 || static_cast<int>(loglik.rows()) != fg.frames()) {
    Fail(ErrorKind::kConfig, "graph spans " + std::to_string(fg.frames()) +
                                 " frames but loglik has shape " +
                                 ShapeToString(loglik.shape()));
  }
  const Graph &g = fg.graph();
  const std::size_t num_pdfs = loglik.cols();
  if (g.MaxPdf() >= static_cast<int>(num_pdfs)) {
    Fail(ErrorKind::kConfig, "graph uses pdf-id " + std::to_string(g.MaxPdf()) +
                                 " but loglik has " + std::to_string(num_pdfs) + " columns");
  }
  for (double v : loglik.values()) {
    if (!std::isfinite(v)) Fail(ErrorKind::kNumeric, "non-finite log-likelihood");
  }
  std::vector<double> score(g.arcs.size());
  for (std::size_t a = 0; a < g.arcs.size(); ++a) {
    const Arc &arc = g.arcs[a];
    const int t = fg.frame_of(arc.src);
    score[a] = t < 0 ? kNegInf
                     : scale * loglik.at(static_cast<std::size_t>(t),
                                         static_cast<std::size_t>(arc.pdf)) +
                           arc.weight;
  }
  return score;
}

ForwardBackwardResult ForwardBackward(const FrameGraph &fg, const Tensor &loglik,
                                      double scale) {
  const std::vector<double> score = ArcScores(fg, loglik, scale);
  const Graph &g = fg.graph();
  const std::size_t num_pdfs = loglik.cols();
  const std::size_t n = static_cast<std::size_t>(g.num_states);
  std::vector<double> alpha(n, kNegInf), beta(n, kNegInf), scratch;
  alpha[static_cast<std::size_t>(g.start)] = 0.0;
  for (int s : fg.order()) {
    if (s == g.start) continue;
    const auto arcs = fg.in_arcs(s);
    scratch.resize(std::max(scratch.size(), arcs.size()));
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      const auto a = static_cast<std::size_t>(arcs[i]);
      scratch[i] = alpha[static_cast<std::size_t>(g.arcs[a].src)] + score[a];
    }
    alpha[static_cast<std::size_t>(s)] = LogSumExpScratch(scratch, arcs.size());
  }
  {
    scratch.clear();
    for (const auto &f : g.finals) {
      scratch.push_back(alpha[static_cast<std::size_t>(f.state)] + fg.final_weight(f.state));
    }
  }
  ForwardBackwardResult result;
  result.total_logprob = LogSumExpScratch(scratch, scratch.size());
  if (!std::isfinite(result.total_logprob)) {
    Fail(ErrorKind::kInfeasible, "no complete path through the graph");
  }

  const auto &order = fg.order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int s = *it;
    const auto arcs = fg.out_arcs(s);
    scratch.resize(std::max(scratch.size(), arcs.size() + 1));
    std::size_t k = 0;
    for (int a : arcs) {
      scratch[k++] = score[static_cast<std::size_t>(a)] +
                     beta[static_cast<std::size_t>(g.arcs[static_cast<std::size_t>(a)].dst)];
    }
    if (fg.is_final(s)) scratch[k++] = fg.final_weight(s);
    beta[static_cast<std::size_t>(s)] = LogSumExpScratch(scratch, k);
  }
  result.backward_logprob = beta[static_cast<std::size_t>(g.start)];

  result.occupancy = Tensor({loglik.rows(), num_pdfs});
  const double total = result.total_logprob;
  for (std::size_t a = 0; a < g.arcs.size(); ++a) {
    const Arc &arc = g.arcs[a];
    const double log_post = alpha[static_cast<std::size_t>(arc.src)] + score[a] +
                            beta[static_cast<std::size_t>(arc.dst)] - total;
    if (log_post == kNegInf) continue;
    result.occupancy.at(static_cast<std::size_t>(fg.frame_of(arc.src)),
                        static_cast<std::size_t>(arc.pdf)) += std::exp(log_post);
  }
  return result;
}

}  // namespace pfsmn
