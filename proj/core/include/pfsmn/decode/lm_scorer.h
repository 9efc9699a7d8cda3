// pfsmn/decode/lm_scorer.h

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

#ifndef PFSMN_DECODE_LM_SCORER_H_
#define PFSMN_DECODE_LM_SCORER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfsmn/graph/phone_lm.h"
#include "pfsmn/numeric/tensor.h"

namespace pfsmn {

class LmScorer {
 public:
  virtual ~LmScorer() = default;
  // Log-probability of the whole phone sequence.
  virtual double Score(std::span<const int> phones) const = 0;
  // Number of predicted events in Score() (for perplexity).
  virtual std::size_t NumEvents(std::span<const int> phones) const { return phones.size(); }
  virtual std::string Name() const = 0;
};

class NGramLm : public LmScorer {
 public:
  explicit NGramLm(PhoneLm lm) : lm_(std::move(lm)) {}
  double Score(std::span<const int> phones) const override { return lm_.ScoreSequence(phones); }
  std::string Name() const override { return "ngram"; }
  const PhoneLm &lm() const { return lm_; }

 private:
  PhoneLm lm_;
};

// 0 for the reference, -1e9 for anything else.
class ReferencePenaltyLm : public LmScorer {
 public:
  static constexpr double kPenalty = -1e9;
  explicit ReferencePenaltyLm(std::vector<int> reference) : reference_(std::move(reference)) {}
  double Score(std::span<const int> phones) const override;
  std::string Name() const override { return "oracle"; }

 private:
  std::vector<int> reference_;
};

struct RnnLmOptions {
  int embed_dim = 8;
  int hidden_dim = 16;
  int epochs = 10;
  double learning_rate = 0.1;
  double clip_norm = 5.0;
  std::uint64_t seed = 1;
};

/// One embedding layer, one tanh recurrent layer and an output affine over
/// V phones plus an end-of-sentence event.  Inputs are a start token followed
/// by the phones; the model predicts each phone and finally the end event.
class TinyRnnLm : public LmScorer {
 public:
  TinyRnnLm(int num_phones, int embed_dim, int hidden_dim);

  // Small uniform weights (outputs start near uniform), zero biases.
  void Initialize(std::uint64_t seed);

  double Score(std::span<const int> phones) const override;
  std::size_t NumEvents(std::span<const int> phones) const override {
    return phones.size() + 1;
  }
  std::string Name() const override { return "rnn"; }

  // Negative log-likelihood of one sequence; with accumulate_grad the
  // parameter gradients are added to the tensors' grad buffers.
  double SequenceLoss(std::span<const int> phones, bool accumulate_grad);

  int num_phones() const { return num_phones_; }
  std::vector<Tensor *> Params();

  nlohmann::json ToJson() const;
  static TinyRnnLm FromJson(const nlohmann::json &j);

 private:
  double Run(std::span<const int> phones, bool accumulate_grad);

  int num_phones_;
  Tensor embed_;     // (V + 1) x E, row V is the start token
  Tensor w_in_;      // E x H
  Tensor w_rec_;     // H x H
  Tensor b_rec_;     // H
  Tensor w_out_;     // H x (V + 1), column V is the end event
  Tensor b_out_;     // V + 1
};

TinyRnnLm TrainTinyRnnLm(std::span<const std::vector<int>> transcripts, int num_phones,
                         const RnnLmOptions &options);

// exp(-sum Score / sum NumEvents).
double Perplexity(const LmScorer &lm, std::span<const std::vector<int>> transcripts);

}  // namespace pfsmn

#endif  // PFSMN_DECODE_LM_SCORER_H_
