// pfsmn/train/metrics.h

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

#ifndef PFSMN_TRAIN_METRICS_H_
#define PFSMN_TRAIN_METRICS_H_

#include <map>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfsmn/graph/phone_lm.h"
#include "pfsmn/loss/forward_backward.h"
#include "pfsmn/net/network.h"
#include "pfsmn/train/corpus.h"

namespace pfsmn {

// Edit distance with unit costs (two-row dynamic program).
std::size_t Levenshtein(std::span<const int> a, std::span<const int> b);

struct Metrics {
  double frame_error = 0.0;  // CE-branch argmax vs the true alignment
  double phone_error = 0.0;  // edit distance / reference length
  std::size_t frames = 0;
  std::size_t frame_errors = 0;
  std::size_t ref_phones = 0;
  std::size_t phone_edits = 0;
};

nlohmann::json ToJson(const Metrics &m);

/// Denominator graphs unrolled per utterance length, built on demand.
class DenominatorCache {
 public:
  explicit DenominatorCache(const PhoneLm &lm) : lm_(lm) {}
  explicit DenominatorCache(PhoneLm &&) = delete;  // the cache keeps a reference
  const FrameGraph &Get(int frames);
  const PhoneLm &lm() const { return lm_; }

 private:
  const PhoneLm &lm_;
  std::map<int, FrameGraph> graphs_;
};

// Phone sequences come from Viterbi on the denominator graph over the chain
// output, scaled by `scale`.
Metrics Evaluate(const Network &net, const Corpus &corpus, DenominatorCache &den,
                 double scale = 1.0);

}  // namespace pfsmn

#endif  // PFSMN_TRAIN_METRICS_H_
