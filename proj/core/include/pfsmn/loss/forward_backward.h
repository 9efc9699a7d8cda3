// pfsmn/loss/forward_backward.h

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

#ifndef PFSMN_LOSS_FORWARD_BACKWARD_H_
#define PFSMN_LOSS_FORWARD_BACKWARD_H_

#include <vector>

#include "pfsmn/graph/graph.h"
#include "pfsmn/numeric/tensor.h"

namespace pfsmn {

/// An unrolled (time-synchronous, acyclic, epsilon-free) graph prepared for
/// repeated forward-backward passes: states in topological order with their
/// frame index, plus incoming/outgoing arc lists.
class FrameGraph {
 public:
  explicit FrameGraph(Graph g);

  const Graph &graph() const { return graph_; }
  int frames() const { return frames_; }
  int num_states() const { return graph_.num_states; }
  int frame_of(int state) const { return frame_[static_cast<std::size_t>(state)]; }
  const std::vector<int> &order() const { return order_; }
  std::span<const int> in_arcs(int state) const;
  std::span<const int> out_arcs(int state) const;
  double final_weight(int state) const { return final_[static_cast<std::size_t>(state)]; }
  bool is_final(int state) const { return is_final_[static_cast<std::size_t>(state)] != 0; }

 private:
  Graph graph_;
  int frames_ = 0;
  std::vector<int> frame_;
  std::vector<int> order_;
  std::vector<int> in_offsets_, in_list_;
  std::vector<int> out_offsets_, out_list_;
  std::vector<double> final_;
  std::vector<char> is_final_;
};

struct ForwardBackwardResult {
  double total_logprob = 0.0;     // from the forward pass
  double backward_logprob = 0.0;  // beta at the start state
  Tensor occupancy;               // T x P posterior of emitting pdf p at frame t
};

// Per-arc score scale * loglik[frame(src), pdf] + weight (-inf for arcs whose
// source is unreachable).  Validates loglik against the graph.
std::vector<double> ArcScores(const FrameGraph &g, const Tensor &loglik, double scale);

// Arc score = scale * loglik[t, pdf] + arc weight.  Throws kInfeasible when no
// complete path has finite score, kConfig when the graph does not match loglik.
ForwardBackwardResult ForwardBackward(const FrameGraph &g, const Tensor &loglik,
                                      double scale);

}  // namespace pfsmn

#endif  // PFSMN_LOSS_FORWARD_BACKWARD_H_
