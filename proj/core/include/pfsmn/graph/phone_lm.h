// pfsmn/graph/phone_lm.h

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

#ifndef PFSMN_GRAPH_PHONE_LM_H_
#define PFSMN_GRAPH_PHONE_LM_H_

#include <map>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace pfsmn {

/// Phone n-gram model over a closed vocabulary 0..V-1 with no end-of-sentence
/// event.  Histories hold up to order-1 tokens; the sentence-start token
/// kSentenceStart may open a history.  Every stored context carries a full
/// next-phone distribution; lookups back off to the longest stored suffix.
class PhoneLm {
 public:
  static constexpr int kSentenceStart = -1;

  using History = std::vector<int>;

  // Maximum likelihood with add-k smoothing over every context seen in the
  // transcripts (all suffix lengths up to order-1).
  static PhoneLm Estimate(std::span<const std::vector<int>> transcripts, int num_phones,
                          int order, double add_k = 0.1);
  static PhoneLm Uniform(int num_phones);

  int order() const { return order_; }
  int num_phones() const { return num_phones_; }
  const std::map<History, std::vector<double>> &contexts() const { return contexts_; }

  // Longest stored suffix of `history` (after truncation to order-1 tokens).
  const History &Resolve(const History &history) const;
  // Start context: [kSentenceStart] resolved.
  const History &StartContext() const;
  // Context reached after emitting `phone` from `context`.
  const History &Next(const History &context, int phone) const;
  double LogProb(const History &context, int phone) const;
  // Sum of log P(p_i | history_i) over the sequence.
  double ScoreSequence(std::span<const int> phones) const;

  nlohmann::json ToJson() const;
  static PhoneLm FromJson(const nlohmann::json &j);

 private:
  void CheckNormalized() const;

  int order_ = 1;
  int num_phones_ = 0;
  double add_k_ = 0.0;
  std::map<History, std::vector<double>> contexts_;
};

}  // namespace pfsmn

#endif  // PFSMN_GRAPH_PHONE_LM_H_
