// graph.cc

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

#include "pfsmn/graph/graph.h"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "pfsmn/error.h"

namespace pfsmn {

namespace {

std::vector<std::vector<int>> OutArcs(const Graph &g) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(g.num_states));
  for (std::size_t a = 0; a < g.arcs.size(); ++a) {
    out[static_cast<std::size_t>(g.arcs[a].src)].push_back(static_cast<int>(a));
  }
  return out;
}

std::vector<double> FinalTable(const Graph &g, std::vector<char> *is_final) {
  std::vector<double> table(static_cast<std::size_t>(g.num_states), 0.0);
  is_final->assign(static_cast<std::size_t>(g.num_states), 0);
  for (const auto &f : g.finals) {
    table[static_cast<std::size_t>(f.state)] = f.weight;
    (*is_final)[static_cast<std::size_t>(f.state)] = 1;
  }
  return table;
}

std::string FormatWeight(double w) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}

}  // namespace

int Graph::MaxPdf() const {
  int m = -1;
  for (const auto &arc : arcs) m = std::max(m, arc.pdf);
  return m;
}

bool Graph::HasEpsilon() const {
  return std::any_of(arcs.begin(), arcs.end(),
                     [](const Arc &a) { return a.pdf == kEpsilon; });
}

void CheckGraph(const Graph &g) {
  auto valid = [&g](int s) { return s >= 0 && s < g.num_states; };
  if (g.num_states > 0 && !valid(g.start)) {
    Fail(ErrorKind::kConfig, "graph start state " + std::to_string(g.start) + " out of range");
  }
  for (const auto &arc : g.arcs) {
    if (!valid(arc.src) || !valid(arc.dst)) {
      Fail(ErrorKind::kConfig, "graph arc " + std::to_string(arc.src) + " -> " +
                                   std::to_string(arc.dst) + " references a missing state");
    }
    if (arc.pdf < kEpsilon) {
      Fail(ErrorKind::kConfig, "graph arc has invalid pdf-id " + std::to_string(arc.pdf));
    }
  }
  std::vector<char> seen(static_cast<std::size_t>(g.num_states), 0);
  for (const auto &f : g.finals) {
    if (!valid(f.state)) {
      Fail(ErrorKind::kConfig, "final state " + std::to_string(f.state) + " out of range");
    }
    if (seen[static_cast<std::size_t>(f.state)]++) {
      Fail(ErrorKind::kConfig, "state " + std::to_string(f.state) + " is final twice");
    }
  }
}

Graph Trim(const Graph &g) {
  CheckGraph(g);
  const std::size_t n = static_cast<std::size_t>(g.num_states);
  std::vector<char> accessible(n, 0), coaccessible(n, 0);
  std::vector<std::vector<int>> fwd(n), bwd(n);
  for (const auto &arc : g.arcs) {
    fwd[static_cast<std::size_t>(arc.src)].push_back(arc.dst);
    bwd[static_cast<std::size_t>(arc.dst)].push_back(arc.src);
  }
  std::vector<int> stack;
  if (n > 0) {
    accessible[static_cast<std::size_t>(g.start)] = 1;
    stack.push_back(g.start);
  }
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (int d : fwd[static_cast<std::size_t>(s)]) {
      if (!accessible[static_cast<std::size_t>(d)]) {
        accessible[static_cast<std::size_t>(d)] = 1;
        stack.push_back(d);
      }
    }
  }
  for (const auto &f : g.finals) {
    if (!coaccessible[static_cast<std::size_t>(f.state)]) {
      coaccessible[static_cast<std::size_t>(f.state)] = 1;
      stack.push_back(f.state);
    }
  }
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (int p : bwd[static_cast<std::size_t>(s)]) {
      if (!coaccessible[static_cast<std::size_t>(p)]) {
        coaccessible[static_cast<std::size_t>(p)] = 1;
        stack.push_back(p);
      }
    }
  }

  std::vector<int> remap(n, -1);
  Graph out;
  for (std::size_t s = 0; s < n; ++s) {
    if (accessible[s] && coaccessible[s]) remap[s] = out.AddState();
  }
  if (out.num_states == 0) {
    Fail(ErrorKind::kEmptyGraph, "graph is empty after trimming");
  }
  out.start = remap[static_cast<std::size_t>(g.start)];
  for (const auto &arc : g.arcs) {
    const int s = remap[static_cast<std::size_t>(arc.src)];
    const int d = remap[static_cast<std::size_t>(arc.dst)];
    if (s >= 0 && d >= 0) out.AddArc(s, d, arc.pdf, arc.weight);
  }
  for (const auto &f : g.finals) {
    const int s = remap[static_cast<std::size_t>(f.state)];
    if (s >= 0) out.SetFinal(s, f.weight);
  }
  return out;
}

std::optional<std::vector<int>> TopologicalOrder(const Graph &g) {
  const std::size_t n = static_cast<std::size_t>(g.num_states);
  std::vector<int> indegree(n, 0);
  for (const auto &arc : g.arcs) ++indegree[static_cast<std::size_t>(arc.dst)];
  const auto out = OutArcs(g);
  std::vector<int> order, ready;
  for (std::size_t s = n; s-- > 0;) {
    if (indegree[s] == 0) ready.push_back(static_cast<int>(s));
  }
  while (!ready.empty()) {
    const int s = ready.back();
    ready.pop_back();
    order.push_back(s);
    for (int a : out[static_cast<std::size_t>(s)]) {
      const int d = g.arcs[static_cast<std::size_t>(a)].dst;
      if (--indegree[static_cast<std::size_t>(d)] == 0) ready.push_back(d);
    }
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

Graph Unroll(const Graph &compact, int frames) {
  CheckGraph(compact);
  if (frames < 0) Fail(ErrorKind::kConfig, "cannot unroll to a negative frame count");
  if (compact.HasEpsilon()) {
    Fail(ErrorKind::kConfig, "unrolling needs an epsilon-free graph");
  }
  const std::size_t n = static_cast<std::size_t>(compact.num_states);
  const auto out_arcs = OutArcs(compact);
  Graph g;
  // ids[t][s] = unrolled id of compact state s at time t, or -1.
  std::vector<std::vector<int>> ids(static_cast<std::size_t>(frames) + 1,
                                    std::vector<int>(n, -1));
  std::vector<int> layer{compact.start}, next;
  ids[0][static_cast<std::size_t>(compact.start)] = g.AddState();
  g.start = 0;
  for (int t = 0; t < frames; ++t) {
    next.clear();
    auto &cur_ids = ids[static_cast<std::size_t>(t)];
    auto &next_ids = ids[static_cast<std::size_t>(t) + 1];
    for (int s : layer) {
      for (int a : out_arcs[static_cast<std::size_t>(s)]) {
        const Arc &arc = compact.arcs[static_cast<std::size_t>(a)];
        int &dst = next_ids[static_cast<std::size_t>(arc.dst)];
        if (dst < 0) {
          dst = g.AddState();
          next.push_back(arc.dst);
        }
        g.AddArc(cur_ids[static_cast<std::size_t>(s)], dst, arc.pdf, arc.weight);
      }
    }
    layer.swap(next);
  }
  for (const auto &f : compact.finals) {
    const int id = ids[static_cast<std::size_t>(frames)][static_cast<std::size_t>(f.state)];
    if (id >= 0) g.SetFinal(id, f.weight);
  }
  std::sort(g.finals.begin(), g.finals.end(),
            [](const FinalWeight &a, const FinalWeight &b) { return a.state < b.state; });
  try {
    return Trim(g);
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::kEmptyGraph) throw;
    Fail(ErrorKind::kInfeasible,
         "graph has no complete path of " + std::to_string(frames) + " frames");
  }
}

std::vector<PathEntry> EnumeratePaths(const Graph &g, int frames, std::size_t limit) {
  CheckGraph(g);
  std::vector<PathEntry> paths;
  if (g.num_states == 0) return paths;
  const auto out_arcs = OutArcs(g);
  std::vector<char> is_final;
  const std::vector<double> final_weight = FinalTable(g, &is_final);

  PathEntry current;
  // Iterative DFS: (state, next out-arc position) frames on an explicit stack.
  struct Frame {
    int state;
    std::size_t next;
    double weight;
  };
  std::vector<Frame> stack{{g.start, 0, 0.0}};
  while (!stack.empty()) {
    Frame &top = stack.back();
    const int depth = static_cast<int>(stack.size()) - 1;
    if (depth == frames) {
      if (is_final[static_cast<std::size_t>(top.state)]) {
        if (paths.size() >= limit) {
          Fail(ErrorKind::kLimitExceeded,
               "more than " + std::to_string(limit) +
                   " paths; shrink the test case (fewer frames or states)");
        }
        PathEntry entry = current;
        entry.weight = top.weight + final_weight[static_cast<std::size_t>(top.state)];
        paths.push_back(std::move(entry));
      }
      stack.pop_back();
      if (!current.arcs.empty()) {
        current.arcs.pop_back();
        current.pdfs.pop_back();
      }
      continue;
    }
    const auto &arcs = out_arcs[static_cast<std::size_t>(top.state)];
    if (top.next == arcs.size()) {
      stack.pop_back();
      if (!current.arcs.empty()) {
        current.arcs.pop_back();
        current.pdfs.pop_back();
      }
      continue;
    }
    const int a = arcs[top.next++];
    const Arc &arc = g.arcs[static_cast<std::size_t>(a)];
    if (arc.pdf == kEpsilon) {
      Fail(ErrorKind::kConfig, "path enumeration needs an epsilon-free graph");
    }
    current.arcs.push_back(a);
    current.pdfs.push_back(arc.pdf);
    stack.push_back({arc.dst, 0, top.weight + arc.weight});
  }
  return paths;
}

void WriteGraphText(std::ostream &os, const Graph &g) {
  os << "PFG1 " << g.num_states << ' ' << g.start << '\n';
  for (const auto &arc : g.arcs) {
    os << arc.src << ' ' << arc.dst << ' ' << arc.pdf << ' ' << FormatWeight(arc.weight)
       << '\n';
  }
  for (const auto &f : g.finals) {
    os << "F " << f.state << ' ' << FormatWeight(f.weight) << '\n';
  }
}

std::string GraphToText(const Graph &g) {
  std::ostringstream os;
  WriteGraphText(os, g);
  return os.str();
}

Graph ReadGraphText(std::istream &is) {
  Graph g;
  std::string line;
  if (!std::getline(is, line)) Fail(ErrorKind::kFormat, "empty graph text");
  {
    std::istringstream header(line);
    std::string magic;
    if (!(header >> magic >> g.num_states >> g.start) || magic != "PFG1") {
      Fail(ErrorKind::kFormat, "bad graph header '" + line + "'");
    }
  }
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    auto bad = [&]() {
      Fail(ErrorKind::kFormat, "graph line " + std::to_string(line_no) + ": '" + line + "'");
    };
    if (line[0] == 'F') {
      std::string tag;
      FinalWeight f;
      if (!(fields >> tag >> f.state >> f.weight)) bad();
      g.finals.push_back(f);
    } else {
      Arc arc;
      if (!(fields >> arc.src >> arc.dst >> arc.pdf >> arc.weight)) bad();
      g.arcs.push_back(arc);
    }
    std::string extra;
    if (fields >> extra) bad();
  }
  CheckGraph(g);
  return g;
}

}  // namespace pfsmn
