// decoder.cc

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

#include "pfsmn/decode/decoder.h"

#include <algorithm>
#include <limits>
#include <map>
#include <tuple>

#include "pfsmn/error.h"
#include "pfsmn/graph/topology.h"

namespace pfsmn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Best completion score from every state (max over suffix paths), and the
// arc that achieves it (-1: stop here).
void BestCompletion(const FrameGraph &fg, const std::vector<double> &score,
                    std::vector<double> *best, std::vector<int> *choice) {
  const Graph &g = fg.graph();
  best->assign(static_cast<std::size_t>(g.num_states), kNegInf);
  choice->assign(static_cast<std::size_t>(g.num_states), -1);
  const auto &order = fg.order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto s = static_cast<std::size_t>(*it);
    double b = fg.is_final(*it) ? fg.final_weight(*it) : kNegInf;
    int c = -1;
    for (int a : fg.out_arcs(*it)) {
      const double v = score[static_cast<std::size_t>(a)] +
                       (*best)[static_cast<std::size_t>(g.arcs[static_cast<std::size_t>(a)].dst)];
      if (v > b) {
        b = v;
        c = a;
      }
    }
    (*best)[s] = b;
    (*choice)[s] = c;
  }
}

bool ExtendsPhone(int last_pdf, int pdf) { return IsEntryPdf(pdf) && pdf != last_pdf; }

}  // namespace

nlohmann::json ToJson(const Hypothesis &h) {
  return {{"phones", h.phones},
          {"pdfs", h.pdfs},
          {"am_score", h.am_score},
          {"lm_score", h.lm_score},
          {"combined", h.combined}};
}

Hypothesis HypothesisFromJson(const nlohmann::json &j) {
  Hypothesis h;
  try {
    h.phones = j.at("phones").get<std::vector<int>>();
    if (j.contains("pdfs")) h.pdfs = j.at("pdfs").get<std::vector<int>>();
    h.am_score = j.at("am_score").get<double>();
    h.lm_score = j.value("lm_score", 0.0);
    h.combined = j.value("combined", h.am_score);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kFormat, std::string("hypothesis: ") + e.what());
  }
  return h;
}

nlohmann::json ToJson(const std::vector<Hypothesis> &hyps) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto &h : hyps) out.push_back(ToJson(h));
  return out;
}

std::vector<Hypothesis> HypothesesFromJson(const nlohmann::json &j) {
  if (!j.is_array()) Fail(ErrorKind::kFormat, "n-best list must be a JSON array");
  std::vector<Hypothesis> out;
  for (const auto &e : j) out.push_back(HypothesisFromJson(e));
  return out;
}

Hypothesis Viterbi(const FrameGraph &fg, const Tensor &loglik, double scale) {
  const std::vector<double> score = ArcScores(fg, loglik, scale);
  std::vector<double> best;
  std::vector<int> choice;
  BestCompletion(fg, score, &best, &choice);
  const Graph &g = fg.graph();
  if (best[static_cast<std::size_t>(g.start)] == kNegInf) {
    Fail(ErrorKind::kInfeasible, "viterbi: no complete path through the graph");
  }
  Hypothesis h;
  int s = g.start;
  double total = 0.0;
  while (choice[static_cast<std::size_t>(s)] >= 0) {
    const auto a = static_cast<std::size_t>(choice[static_cast<std::size_t>(s)]);
    h.pdfs.push_back(g.arcs[a].pdf);
    total += score[a];
    s = g.arcs[a].dst;
  }
  total += fg.final_weight(s);
  h.phones = PdfsToPhones(h.pdfs);
  h.am_score = total;
  h.combined = total;
  return h;
}

std::vector<Hypothesis> NBest(const FrameGraph &fg, const Tensor &loglik, double scale, int n,
                              int beam) {
  if (n < 1) Fail(ErrorKind::kConfig, "nbest: n must be >= 1");
  if (beam < 1) Fail(ErrorKind::kConfig, "nbest: beam must be >= 1");
  const Hypothesis viterbi = Viterbi(fg, loglik, scale);
  const std::vector<double> score = ArcScores(fg, loglik, scale);
  std::vector<double> best;
  std::vector<int> choice;
  BestCompletion(fg, score, &best, &choice);
  const Graph &g = fg.graph();

  struct Partial {
    double score;
    std::vector<int> pdfs;
  };
  using Key = std::tuple<int, int, std::vector<int>>;  // state, last pdf, phones
  std::map<Key, Partial> layer;
  layer[{g.start, -1, {}}] = Partial{0.0, {}};
  for (int t = 0; t < fg.frames(); ++t) {
    std::map<Key, Partial> next;
    for (const auto &[key, part] : layer) {
      const auto &[state, last_pdf, phones] = key;
      for (int a : fg.out_arcs(state)) {
        const Arc &arc = g.arcs[static_cast<std::size_t>(a)];
        const double s = part.score + score[static_cast<std::size_t>(a)];
        if (s == kNegInf || best[static_cast<std::size_t>(arc.dst)] == kNegInf) continue;
        std::vector<int> ph = phones;
        if (ExtendsPhone(last_pdf, arc.pdf)) ph.push_back(PhoneOfPdf(arc.pdf));
        Key nk{arc.dst, arc.pdf, std::move(ph)};
        auto it = next.find(nk);
        if (it == next.end() || s > it->second.score) {
          Partial np{s, part.pdfs};
          np.pdfs.push_back(arc.pdf);
          next[std::move(nk)] = std::move(np);
        }
      }
    }
    if (static_cast<int>(next.size()) > beam) {
      std::vector<std::pair<double, const Key *>> ranked;
      for (const auto &[key, part] : next) {
        ranked.emplace_back(part.score + best[static_cast<std::size_t>(std::get<0>(key))], &key);
      }
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto &x, const auto &y) { return x.first > y.first; });
      std::map<Key, Partial> kept;
      for (int i = 0; i < beam; ++i) {
        auto node = next.extract(*ranked[static_cast<std::size_t>(i)].second);
        kept.insert(std::move(node));
      }
      next = std::move(kept);
    }
    layer = std::move(next);
  }

  std::map<std::vector<int>, Hypothesis> by_phones;
  for (const auto &[key, part] : layer) {
    const auto &[state, last_pdf, phones] = key;
    if (!fg.is_final(state)) continue;
    const double total = part.score + fg.final_weight(state);
    auto it = by_phones.find(phones);
    if (it == by_phones.end() || total > it->second.am_score) {
      Hypothesis h;
      h.phones = phones;
      h.pdfs = part.pdfs;
      h.am_score = total;
      h.combined = total;
      by_phones[phones] = std::move(h);
    }
  }
  by_phones.erase(viterbi.phones);
  std::vector<Hypothesis> out;
  out.reserve(by_phones.size() + 1);
  for (auto &[phones, h] : by_phones) out.push_back(std::move(h));
  std::stable_sort(out.begin(), out.end(), [](const Hypothesis &x, const Hypothesis &y) {
    return x.am_score > y.am_score;
  });
  out.insert(out.begin(), viterbi);
  if (static_cast<int>(out.size()) > n) out.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace pfsmn
