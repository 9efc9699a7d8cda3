// pfsmn/decode/rescore.h

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

#ifndef PFSMN_DECODE_RESCORE_H_
#define PFSMN_DECODE_RESCORE_H_

#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfsmn/decode/decoder.h"
#include "pfsmn/decode/lm_scorer.h"

namespace pfsmn {

// Fills lm_score, sets combined = am_score + lmwt * lm_score and stable-sorts
// by descending combined score.
std::vector<Hypothesis> Rescore(std::vector<Hypothesis> hyps, const LmScorer &lm, double lmwt);

// {0.2, 0.4, ..., 2.0}
std::vector<double> DefaultLmwtGrid();

struct NBestEntry {
  std::vector<int> reference;
  std::vector<Hypothesis> hyps;  // in decoder order
};

struct SweepPoint {
  double lmwt = 0.0;
  double phone_error = 0.0;     // top-1 edits / reference phones
  double top1_accuracy = 0.0;   // fraction of utterances with top-1 == reference
};

// Fraction of utterances whose reference appears anywhere in the list.
double OracleAccuracy(std::span<const NBestEntry> entries);

using LmForUtterance = std::function<const LmScorer &(std::size_t index)>;

SweepPoint EvaluateLmwt(std::span<const NBestEntry> entries, const LmForUtterance &lm,
                        double lmwt);
std::vector<SweepPoint> SweepLmwt(std::span<const NBestEntry> entries,
                                  const LmForUtterance &lm, std::span<const double> grid);

nlohmann::json ToJson(const SweepPoint &p);

}  // namespace pfsmn

#endif  // PFSMN_DECODE_RESCORE_H_
