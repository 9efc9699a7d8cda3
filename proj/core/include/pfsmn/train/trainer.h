// pfsmn/train/trainer.h

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

#ifndef PFSMN_TRAIN_TRAINER_H_
#define PFSMN_TRAIN_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfsmn/graph/phone_lm.h"
#include "pfsmn/net/network.h"
#include "pfsmn/train/corpus.h"

namespace pfsmn {

struct TrainConfig {
  int epochs = 20;
  int batch_size = 8;
  double learning_rate = 0.03;
  double lr_decay = 0.5;  // multiplied in every `decay_every` epochs
  int decay_every = 5;
  double momentum = 0.9;
  // Global gradient-norm cap per batch (after L2); 0 disables.
  double max_grad_norm = 5.0;
  double alpha = 0.1;           // CE weight
  double acoustic_scale = 1.0;  // k
  // Overrides the network config's l2_coefficient when set.
  std::optional<double> l2_coefficient;
  int den_lm_order = 4;
  std::uint64_t seed = 1;

  void Validate() const;
  double LearningRateAt(int epoch) const;  // epoch is 0-based
};

nlohmann::json ToJson(const TrainConfig &tc);
TrainConfig TrainConfigFromJson(const nlohmann::json &j);

struct EpochStats {
  int epoch = 0;  // 1-based
  double learning_rate = 0.0;
  // Per-frame averages over the epoch, computed before each batch's update.
  double objective = 0.0;  // -lfmmi + alpha * ce + l2
  double lfmmi = 0.0;
  double ce = 0.0;
  double l2 = 0.0;         // mean over batches
  double frame_accuracy = 0.0;
  std::size_t frames = 0;
  std::size_t skipped = 0;  // utterances with an infeasible numerator
};

nlohmann::json ToJson(const EpochStats &s);

struct TrainResult {
  PhoneLm den_lm;
  std::vector<EpochStats> history;
};

using EpochCallback = std::function<void(const EpochStats &)>;

// Mini-batch SGD with momentum on -L_LFMMI + alpha * L_CE + L2, with
// utterances bucketed by length and the batch order shuffled every epoch.
// The denominator LM is estimated from the corpus transcripts.  Throws
// kNumeric naming the batch when a loss or gradient is not finite.
TrainResult Train(Network &net, const Corpus &corpus, const TrainConfig &tc,
                  const EpochCallback &on_epoch = {});

}  // namespace pfsmn

#endif  // PFSMN_TRAIN_TRAINER_H_
