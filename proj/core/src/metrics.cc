// metrics.cc

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

#include "pfsmn/train/metrics.h"

#include <algorithm>
#include <numeric>

#include "pfsmn/decode/decoder.h"
#include "pfsmn/error.h"
#include "pfsmn/graph/topology.h"

namespace pfsmn {

std::size_t Levenshtein(std::span<const int> a, std::span<const int> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

nlohmann::json ToJson(const Metrics &m) {
  return {{"frame_error", m.frame_error},   {"phone_error", m.phone_error},
          {"frames", m.frames},             {"frame_errors", m.frame_errors},
          {"ref_phones", m.ref_phones},     {"phone_edits", m.phone_edits}};
}

const FrameGraph &DenominatorCache::Get(int frames) {
  auto it = graphs_.find(frames);
  if (it == graphs_.end()) {
    it = graphs_.emplace(frames, FrameGraph(BuildDenominatorGraph(lm_, frames))).first;
  }
  return it->second;
}

Metrics Evaluate(const Network &net, const Corpus &corpus, DenominatorCache &den,
                 double scale) {
  if (corpus.utterances.empty()) Fail(ErrorKind::kConfig, "evaluate: empty corpus");
  if (net.config().input_dim != corpus.spec.feature_dim) {
    Fail(ErrorKind::kConfig, "evaluate: network expects F=" +
                                 std::to_string(net.config().input_dim) + " but corpus has F=" +
                                 std::to_string(corpus.spec.feature_dim));
  }
  Metrics m;
  for (const auto &utt : corpus.utterances) {
    const NetworkActivations acts = net.Forward(utt.features);
    const Tensor &logits = acts.xent_logits;
    for (std::size_t t = 0; t < logits.rows(); ++t) {
      std::size_t best = 0;
      for (std::size_t p = 1; p < logits.cols(); ++p) {
        if (logits.at(t, p) > logits.at(t, best)) best = p;
      }
      if (static_cast<int>(best) != utt.alignment[t]) ++m.frame_errors;
    }
    m.frames += logits.rows();
    const Hypothesis hyp = Viterbi(den.Get(utt.frames()), acts.chain_output, scale);
    m.phone_edits += Levenshtein(hyp.phones, utt.phones);
    m.ref_phones += utt.phones.size();
  }
  m.frame_error = static_cast<double>(m.frame_errors) / static_cast<double>(m.frames);
  m.phone_error = static_cast<double>(m.phone_edits) / static_cast<double>(m.ref_phones);
  return m;
}

}  // namespace pfsmn
