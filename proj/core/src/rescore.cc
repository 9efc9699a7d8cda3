// rescore.cc

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

#include "pfsmn/decode/rescore.h"

#include <algorithm>

#include "pfsmn/error.h"
#include "pfsmn/train/metrics.h"

namespace pfsmn {

std::vector<Hypothesis> Rescore(std::vector<Hypothesis> hyps, const LmScorer &lm, double lmwt) {
  for (auto &h : hyps) {
    h.lm_score = lm.Score(h.phones);
    h.combined = h.am_score + lmwt * h.lm_score;
  }
  std::stable_sort(hyps.begin(), hyps.end(), [](const Hypothesis &a, const Hypothesis &b) {
    return a.combined > b.combined;
  });
  return hyps;
}

std::vector<double> DefaultLmwtGrid() {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(i / 5.0);
  return grid;
}

double OracleAccuracy(std::span<const NBestEntry> entries) {
  if (entries.empty()) Fail(ErrorKind::kConfig, "oracle accuracy over zero utterances");
  std::size_t hits = 0;
  for (const auto &e : entries) {
    const bool found = std::any_of(e.hyps.begin(), e.hyps.end(),
                                   [&](const Hypothesis &h) { return h.phones == e.reference; });
    hits += found ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(entries.size());
}

SweepPoint EvaluateLmwt(std::span<const NBestEntry> entries, const LmForUtterance &lm,
                        double lmwt) {
  if (entries.empty()) Fail(ErrorKind::kConfig, "lmwt evaluation over zero utterances");
  std::size_t edits = 0, ref_phones = 0, correct = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto &e = entries[i];
    if (e.hyps.empty()) Fail(ErrorKind::kConfig, "empty n-best list for utterance " + std::to_string(i));
    const auto ranked = Rescore(e.hyps, lm(i), lmwt);
    edits += Levenshtein(ranked.front().phones, e.reference);
    ref_phones += e.reference.size();
    correct += ranked.front().phones == e.reference ? 1 : 0;
  }
  SweepPoint p;
  p.lmwt = lmwt;
  p.phone_error = static_cast<double>(edits) / static_cast<double>(std::max<std::size_t>(ref_phones, 1));
  p.top1_accuracy = static_cast<double>(correct) / static_cast<double>(entries.size());
  return p;
}

std::vector<SweepPoint> SweepLmwt(std::span<const NBestEntry> entries,
                                  const LmForUtterance &lm, std::span<const double> grid) {
  std::vector<SweepPoint> out;
  for (double w : grid) out.push_back(EvaluateLmwt(entries, lm, w));
  return out;
}

nlohmann::json ToJson(const SweepPoint &p) {
  return {{"lmwt", p.lmwt}, {"phone_error", p.phone_error}, {"top1_accuracy", p.top1_accuracy}};
}

}  // namespace pfsmn
