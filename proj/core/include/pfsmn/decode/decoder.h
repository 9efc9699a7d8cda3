// pfsmn/decode/decoder.h

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

#ifndef PFSMN_DECODE_DECODER_H_
#define PFSMN_DECODE_DECODER_H_

#include <vector>

#include <nlohmann/json.hpp>

#include "pfsmn/loss/forward_backward.h"
#include "pfsmn/numeric/tensor.h"

namespace pfsmn {

struct Hypothesis {
  std::vector<int> phones;
  std::vector<int> pdfs;  // best alignment of this phone sequence
  double am_score = 0.0;  // path score: scale * loglik + graph weights
  double lm_score = 0.0;
  double combined = 0.0;
};

nlohmann::json ToJson(const Hypothesis &h);
Hypothesis HypothesisFromJson(const nlohmann::json &j);
nlohmann::json ToJson(const std::vector<Hypothesis> &hyps);
std::vector<Hypothesis> HypothesesFromJson(const nlohmann::json &j);

// Best path.  Among equal-scoring paths the one with the lexicographically
// smallest arc-index sequence wins.  am_score is summed along the path in
// time order.  Throws kInfeasible when no complete path exists.
Hypothesis Viterbi(const FrameGraph &g, const Tensor &loglik, double scale);

// Up to n distinct phone sequences, each scored by its best alignment, sorted
// by descending score (ties: smaller phone sequence first).  The Viterbi
// hypothesis is always first.  Frame-synchronous search keeping at most
// `beam` partial paths per frame, ranked by score plus the exact best
// completion.
std::vector<Hypothesis> NBest(const FrameGraph &g, const Tensor &loglik, double scale, int n,
                              int beam = 200);

}  // namespace pfsmn

#endif  // PFSMN_DECODE_DECODER_H_
