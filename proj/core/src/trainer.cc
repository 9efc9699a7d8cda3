// trainer.cc

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

#include "pfsmn/train/trainer.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "pfsmn/error.h"
#include "pfsmn/graph/topology.h"
#include "pfsmn/loss/chain_loss.h"
#include "pfsmn/numeric/rng.h"
#include "pfsmn/train/metrics.h"

namespace pfsmn {

namespace {

std::vector<std::vector<std::size_t>> MakeBatches(const Corpus &corpus, int batch_size) {
  std::vector<std::size_t> order(corpus.utterances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return corpus.utterances[a].frames() < corpus.utterances[b].frames();
  });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(order.size(), i + static_cast<std::size_t>(batch_size));
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void TrainConfig::Validate() const {
  if (epochs < 0) Fail(ErrorKind::kConfig, "train: epochs must be >= 0");
  if (batch_size < 1) Fail(ErrorKind::kConfig, "train: batch_size must be >= 1");
  if (!(learning_rate >= 0.0)) Fail(ErrorKind::kConfig, "train: learning_rate must be >= 0");
  if (!(lr_decay > 0.0)) Fail(ErrorKind::kConfig, "train: lr_decay must be > 0");
  if (decay_every < 1) Fail(ErrorKind::kConfig, "train: decay_every must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    Fail(ErrorKind::kConfig, "train: momentum must be in [0, 1)");
  }
  if (!(max_grad_norm >= 0.0)) Fail(ErrorKind::kConfig, "train: max_grad_norm must be >= 0");
  if (!(alpha >= 0.0)) Fail(ErrorKind::kConfig, "train: alpha must be >= 0");
  if (!(acoustic_scale >= 0.0)) Fail(ErrorKind::kConfig, "train: acoustic_scale must be >= 0");
  if (l2_coefficient && !(*l2_coefficient >= 0.0)) {
    Fail(ErrorKind::kConfig, "train: l2_coefficient must be >= 0");
  }
  if (den_lm_order < 1) Fail(ErrorKind::kConfig, "train: den_lm_order must be >= 1");
}

double TrainConfig::LearningRateAt(int epoch) const {
  return learning_rate * std::pow(lr_decay, epoch / decay_every);
}

nlohmann::json ToJson(const TrainConfig &tc) {
  nlohmann::json j = {{"epochs", tc.epochs},           {"batch_size", tc.batch_size},
                      {"learning_rate", tc.learning_rate}, {"lr_decay", tc.lr_decay},
                      {"decay_every", tc.decay_every}, {"momentum", tc.momentum},
                      {"max_grad_norm", tc.max_grad_norm},
                      {"alpha", tc.alpha},             {"acoustic_scale", tc.acoustic_scale},
                      {"den_lm_order", tc.den_lm_order}, {"seed", tc.seed}};
  if (tc.l2_coefficient) j["l2_coefficient"] = *tc.l2_coefficient;
  return j;
}

TrainConfig TrainConfigFromJson(const nlohmann::json &j) {
  if (!j.is_object()) Fail(ErrorKind::kConfig, "train config must be a JSON object");
  TrainConfig tc;
  for (const auto &[key, value] : j.items()) {
    try {
      if (key == "epochs") tc.epochs = value.get<int>();
      else if (key == "batch_size") tc.batch_size = value.get<int>();
      else if (key == "learning_rate") tc.learning_rate = value.get<double>();
      else if (key == "lr_decay") tc.lr_decay = value.get<double>();
      else if (key == "decay_every") tc.decay_every = value.get<int>();
      else if (key == "momentum") tc.momentum = value.get<double>();
      else if (key == "max_grad_norm") tc.max_grad_norm = value.get<double>();
      else if (key == "alpha") tc.alpha = value.get<double>();
      else if (key == "acoustic_scale") tc.acoustic_scale = value.get<double>();
      else if (key == "l2_coefficient") tc.l2_coefficient = value.get<double>();
      else if (key == "den_lm_order") tc.den_lm_order = value.get<int>();
      else if (key == "seed") tc.seed = value.get<std::uint64_t>();
      else Fail(ErrorKind::kConfig, "train config: unknown key '" + key + "'");
    } catch (const nlohmann::json::exception &e) {
      Fail(ErrorKind::kConfig, "train config: bad value for '" + key + "': " + e.what());
    }
  }
  tc.Validate();
  return tc;
}

nlohmann::json ToJson(const EpochStats &s) {
  return {{"epoch", s.epoch},
          {"learning_rate", s.learning_rate},
          {"objective", s.objective},
          {"lfmmi", s.lfmmi},
          {"ce", s.ce},
          {"l2", s.l2},
          {"frame_accuracy", s.frame_accuracy},
          {"frames", s.frames},
          {"skipped", s.skipped}};
}

TrainResult Train(Network &net, const Corpus &corpus, const TrainConfig &tc,
                  const EpochCallback &on_epoch) {
  tc.Validate();
  if (corpus.utterances.empty()) Fail(ErrorKind::kConfig, "train: empty corpus");
  const NetworkConfig &cfg = net.config();
  if (cfg.input_dim != corpus.spec.feature_dim) {
    Fail(ErrorKind::kConfig, "train: network expects F=" + std::to_string(cfg.input_dim) +
                                 " but corpus has F=" + std::to_string(corpus.spec.feature_dim));
  }
  if (cfg.output_dim != NumPdfs(corpus.spec.num_phones)) {
    Fail(ErrorKind::kConfig, "train: network has " + std::to_string(cfg.output_dim) +
                                 " outputs but the corpus has " +
                                 std::to_string(NumPdfs(corpus.spec.num_phones)) + " pdf-ids");
  }
  const double l2 = tc.l2_coefficient.value_or(cfg.l2_coefficient);
  const int num_phones = corpus.spec.num_phones;

  TrainResult result{PhoneLm::Estimate(Transcripts(corpus), num_phones, tc.den_lm_order), {}};
  DenominatorCache den(result.den_lm);
  std::map<std::size_t, FrameGraph> num_graphs;
  std::vector<char> infeasible(corpus.utterances.size(), 0);

  std::vector<Tensor *> params = net.ParamPointers();
  std::vector<std::vector<double>> velocity;
  for (Tensor *p : params) velocity.emplace_back(p->size(), 0.0);

  auto batches = MakeBatches(corpus, tc.batch_size);
  Rng rng(tc.seed);
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    const double lr = tc.LearningRateAt(epoch);
    rng.Shuffle(batches);
    EpochStats stats;
    stats.epoch = epoch + 1;
    stats.learning_rate = lr;
    double sum_mmi = 0.0, sum_ce = 0.0, sum_l2 = 0.0;
    std::size_t correct = 0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto &batch = batches[b];
      const auto fail_batch = [&](const std::string &what) {
        Fail(ErrorKind::kNumeric, "non-finite " + what + " in epoch " +
                                      std::to_string(epoch + 1) + ", batch " +
                                      std::to_string(b));
      };
      std::size_t batch_frames = 0;
      for (std::size_t u : batch) {
        if (!infeasible[u]) batch_frames += static_cast<std::size_t>(corpus.utterances[u].frames());
      }
      net.ZeroGrad();
      for (std::size_t u : batch) {
        if (infeasible[u]) {
          ++stats.skipped;
          continue;
        }
        const Utterance &utt = corpus.utterances[u];
        auto it = num_graphs.find(u);
        if (it == num_graphs.end()) {
          try {
            it = num_graphs
                     .emplace(u, FrameGraph(BuildNumeratorGraph(utt.phones, utt.frames(),
                                                                num_phones, &result.den_lm)))
                     .first;
          } catch (const Error &e) {
            if (e.kind() != ErrorKind::kInfeasible) throw;
            infeasible[u] = 1;
            ++stats.skipped;
            batch_frames -= static_cast<std::size_t>(utt.frames());
            continue;
          }
        }
        NetworkActivations acts = net.Forward(utt.features);
        const JointLossReport loss =
            JointLoss(it->second, den.Get(utt.frames()), acts.chain_output, acts.xent_logits,
                      utt.alignment, tc.acoustic_scale, tc.alpha);
        if (!std::isfinite(loss.value)) fail_batch("loss");
        if (!AllFinite(loss.chain_grad.values()) || !AllFinite(loss.xent_grad.values())) {
          fail_batch("loss gradient");
        }
        sum_mmi += loss.mmi.value;
        sum_ce += loss.xent.value;
        stats.frames += static_cast<std::size_t>(utt.frames());
        for (std::size_t t = 0; t < acts.xent_logits.rows(); ++t) {
          std::size_t best = 0;
          for (std::size_t p = 1; p < acts.xent_logits.cols(); ++p) {
            if (acts.xent_logits.at(t, p) > acts.xent_logits.at(t, best)) best = p;
          }
          correct += static_cast<int>(best) == utt.alignment[t] ? 1 : 0;
        }
        const double norm = 1.0 / static_cast<double>(batch_frames);
        auto gc = acts.chain_output.grad();
        for (std::size_t i = 0; i < gc.size(); ++i) gc[i] = norm * loss.chain_grad[i];
        auto gx = acts.xent_logits.grad();
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] = norm * loss.xent_grad[i];
        net.Backward(acts);
      }
      if (batch_frames == 0) continue;
      sum_l2 += L2Penalty(params, l2);
      double norm2 = 0.0;
      for (std::size_t p = 0; p < params.size(); ++p) {
        const auto g = std::as_const(*params[p]).grad();
        if (!AllFinite(g)) fail_batch("gradient for " + net.param_names()[p]);
        for (double x : g) norm2 += x * x;
      }
      const double norm = std::sqrt(norm2);
      const double step = tc.max_grad_norm > 0.0 && norm > tc.max_grad_norm
                              ? lr * tc.max_grad_norm / norm
                              : lr;
      for (std::size_t p = 0; p < params.size(); ++p) {
        const auto g = std::as_const(*params[p]).grad();
        if (g.empty()) continue;
        auto v = params[p]->values();
        auto &vel = velocity[p];
        for (std::size_t i = 0; i < v.size(); ++i) {
          vel[i] = tc.momentum * vel[i] - step * g[i];
          v[i] += vel[i];
        }
      }
    }
    if (stats.frames > 0) {
      const double frames = static_cast<double>(stats.frames);
      stats.lfmmi = sum_mmi / frames;
      stats.ce = sum_ce / frames;
      stats.frame_accuracy = static_cast<double>(correct) / frames;
    }
    stats.l2 = sum_l2 / static_cast<double>(batches.size());
    stats.objective = -stats.lfmmi + tc.alpha * stats.ce + stats.l2;
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  net.ZeroGrad();
  return result;
}

}  // namespace pfsmn
