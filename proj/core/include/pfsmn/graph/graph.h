// pfsmn/graph/graph.h

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

#ifndef PFSMN_GRAPH_GRAPH_H_
#define PFSMN_GRAPH_GRAPH_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pfsmn {

inline constexpr int kEpsilon = -1;

struct Arc {
  int src = 0;
  int dst = 0;
  int pdf = kEpsilon;
  double weight = 0.0;  // log-domain
};

struct FinalWeight {
  int state = 0;
  double weight = 0.0;
};

/// Weighted finite-state acceptor over pdf-ids.  Every non-epsilon arc
/// consumes one frame.
struct Graph {
  int num_states = 0;
  int start = 0;
  std::vector<Arc> arcs;
  std::vector<FinalWeight> finals;

  int AddState() { return num_states++; }
  void AddArc(int src, int dst, int pdf, double weight) {
    arcs.push_back({src, dst, pdf, weight});
  }
  void SetFinal(int state, double weight) { finals.push_back({state, weight}); }
  // Largest pdf-id used, or -1.
  int MaxPdf() const;
  bool HasEpsilon() const;
};

// Throws Error(kConfig) on out-of-range state ids or duplicate finals.
void CheckGraph(const Graph &g);

// Removes states that are not reachable from start or cannot reach a final
// state; survivors are renumbered in increasing order of their old ids.
// Throws Error(kEmptyGraph) if nothing survives.
Graph Trim(const Graph &g);

// States in topological order, or nullopt if the graph has a cycle.
std::optional<std::vector<int>> TopologicalOrder(const Graph &g);

// Time-state product: state (t, s) for every compact state s reachable after t
// frames, arcs from layer t to layer t + 1, finals only in layer T.  The result
// is trimmed and states are numbered in time order.  Throws kInfeasible when no
// path of exactly T frames exists.
Graph Unroll(const Graph &compact, int frames);

struct PathEntry {
  std::vector<int> pdfs;
  std::vector<int> arcs;  // arc indices into Graph::arcs
  double weight = 0.0;    // arc weights plus the final weight
};

// Every path of exactly `frames` arcs from start to a final state.  Intended
// as a brute-force oracle; throws kLimitExceeded past `limit` paths.
std::vector<PathEntry> EnumeratePaths(const Graph &g, int frames, std::size_t limit);

// Text format: header "PFG1 num_states start", one arc per line
// "src dst pdf_id log_weight" (pdf_id -1 for epsilon), final lines
// "F state final_log_weight".  Weights are written with 17 significant
// digits, so a round trip is exact.
void WriteGraphText(std::ostream &os, const Graph &g);
Graph ReadGraphText(std::istream &is);
std::string GraphToText(const Graph &g);

}  // namespace pfsmn

#endif  // PFSMN_GRAPH_GRAPH_H_
