// lm_scorer.cc

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

#include "pfsmn/decode/lm_scorer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "pfsmn/error.h"
#include "pfsmn/numeric/rng.h"

namespace pfsmn {

namespace {

void FillUniform(Tensor &t, Rng &rng, double range) {
  for (double &v : t.values()) v = rng.Uniform(-range, range);
}

std::vector<double> TensorValues(const nlohmann::json &j, const char *key) {
  return j.at(key).get<std::vector<double>>();
}

}  // namespace

double ReferencePenaltyLm::Score(std::span<const int> phones) const {
  return std::equal(phones.begin(), phones.end(), reference_.begin(), reference_.end())
             ? 0.0
             : kPenalty;
}

TinyRnnLm::TinyRnnLm(int num_phones, int embed_dim, int hidden_dim)
    : num_phones_(num_phones) {
  if (num_phones < 1 || embed_dim < 1 || hidden_dim < 1) {
    Fail(ErrorKind::kConfig, "rnn lm: vocabulary and layer sizes must be >= 1");
  }
  const auto v1 = static_cast<std::size_t>(num_phones) + 1;
  const auto e = static_cast<std::size_t>(embed_dim);
  const auto h = static_cast<std::size_t>(hidden_dim);
  embed_ = Tensor({v1, e});
  w_in_ = Tensor({e, h});
  w_rec_ = Tensor({h, h});
  b_rec_ = Tensor({h});
  w_out_ = Tensor({h, v1});
  b_out_ = Tensor({v1});
}

void TinyRnnLm::Initialize(std::uint64_t seed) {
  Rng rng(seed);
  FillUniform(embed_, rng, 0.5);
  FillUniform(w_in_, rng, 0.5);
  FillUniform(w_rec_, rng, 0.5 / std::sqrt(static_cast<double>(w_rec_.rows())));
  b_rec_.Fill(0.0);
  FillUniform(w_out_, rng, 0.01);
  b_out_.Fill(0.0);
}

std::vector<Tensor *> TinyRnnLm::Params() {
  return {&embed_, &w_in_, &w_rec_, &b_rec_, &w_out_, &b_out_};
}

double TinyRnnLm::Score(std::span<const int> phones) const {
  return -const_cast<TinyRnnLm *>(this)->Run(phones, false);
}

double TinyRnnLm::SequenceLoss(std::span<const int> phones, bool accumulate_grad) {
  return Run(phones, accumulate_grad);
}

double TinyRnnLm::Run(std::span<const int> phones, bool accumulate_grad) {
  for (int p : phones) {
    if (p < 0 || p >= num_phones_) {
      Fail(ErrorKind::kConfig, "rnn lm: phone " + std::to_string(p) + " out of range");
    }
  }
  const std::size_t E = w_in_.rows(), H = w_rec_.rows(), O = w_out_.cols();
  const std::size_t steps = phones.size() + 1;
  const auto input_at = [&](std::size_t i) {
    return i == 0 ? static_cast<std::size_t>(num_phones_) : static_cast<std::size_t>(phones[i - 1]);
  };
  const auto target_at = [&](std::size_t i) {
    return i < phones.size() ? static_cast<std::size_t>(phones[i])
                             : static_cast<std::size_t>(num_phones_);
  };

  std::vector<std::vector<double>> hs(steps + 1, std::vector<double>(H, 0.0));
  std::vector<std::vector<double>> probs(steps, std::vector<double>(O, 0.0));
  double loss = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const std::size_t tok = input_at(i);
    auto &h = hs[i + 1];
    const auto &prev = hs[i];
    for (std::size_t k = 0; k < H; ++k) {
      double z = b_rec_[k];
      for (std::size_t e = 0; e < E; ++e) z += embed_.at(tok, e) * w_in_.at(e, k);
      for (std::size_t j = 0; j < H; ++j) z += prev[j] * w_rec_.at(j, k);
      h[k] = std::tanh(z);
    }
    auto &p = probs[i];
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < O; ++o) {
      double z = b_out_[o];
      for (std::size_t k = 0; k < H; ++k) z += h[k] * w_out_.at(k, o);
      p[o] = z;
      m = std::max(m, z);
    }
    double sum = 0.0;
    for (std::size_t o = 0; o < O; ++o) sum += std::exp(p[o] - m);
    const double lse = m + std::log(sum);
    loss -= p[target_at(i)] - lse;
    for (std::size_t o = 0; o < O; ++o) p[o] = std::exp(p[o] - lse);
  }
  if (!accumulate_grad) return loss;

  auto g_embed = embed_.grad();
  auto g_in = w_in_.grad();
  auto g_rec = w_rec_.grad();
  auto g_brec = b_rec_.grad();
  auto g_out = w_out_.grad();
  auto g_bout = b_out_.grad();
  std::vector<double> dh_next(H, 0.0), dz(H), dlogit(O);
  for (std::size_t i = steps; i-- > 0;) {
    const auto &h = hs[i + 1];
    const auto &prev = hs[i];
    for (std::size_t o = 0; o < O; ++o) dlogit[o] = probs[i][o];
    dlogit[target_at(i)] -= 1.0;
    std::vector<double> dh = dh_next;
    for (std::size_t o = 0; o < O; ++o) {
      g_bout[o] += dlogit[o];
      for (std::size_t k = 0; k < H; ++k) {
        g_out[k * O + o] += h[k] * dlogit[o];
        dh[k] += w_out_.at(k, o) * dlogit[o];
      }
    }
    for (std::size_t k = 0; k < H; ++k) dz[k] = dh[k] * (1.0 - h[k] * h[k]);
    const std::size_t tok = input_at(i);
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    for (std::size_t k = 0; k < H; ++k) {
      g_brec[k] += dz[k];
      for (std::size_t e = 0; e < E; ++e) {
        g_in[e * H + k] += embed_.at(tok, e) * dz[k];
        g_embed[tok * E + e] += w_in_.at(e, k) * dz[k];
      }
      for (std::size_t j = 0; j < H; ++j) {
        g_rec[j * H + k] += prev[j] * dz[k];
        dh_next[j] += w_rec_.at(j, k) * dz[k];
      }
    }
  }
  return loss;
}

nlohmann::json TinyRnnLm::ToJson() const {
  return {{"num_phones", num_phones_},
          {"embed_dim", w_in_.rows()},
          {"hidden_dim", w_rec_.rows()},
          {"embed", embed_.values()},
          {"w_in", w_in_.values()},
          {"w_rec", w_rec_.values()},
          {"b_rec", b_rec_.values()},
          {"w_out", w_out_.values()},
          {"b_out", b_out_.values()}};
}

TinyRnnLm TinyRnnLm::FromJson(const nlohmann::json &j) {
  try {
    TinyRnnLm lm(j.at("num_phones").get<int>(), j.at("embed_dim").get<int>(),
                 j.at("hidden_dim").get<int>());
    const std::pair<Tensor *, const char *> fields[] = {
        {&lm.embed_, "embed"}, {&lm.w_in_, "w_in"},   {&lm.w_rec_, "w_rec"},
        {&lm.b_rec_, "b_rec"}, {&lm.w_out_, "w_out"}, {&lm.b_out_, "b_out"}};
    for (const auto &[tensor, key] : fields) {
      *tensor = Tensor(tensor->shape(), TensorValues(j, key));
    }
    return lm;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kFormat, std::string("rnn lm: ") + e.what());
  }
}

TinyRnnLm TrainTinyRnnLm(std::span<const std::vector<int>> transcripts, int num_phones,
                         const RnnLmOptions &options) {
  if (transcripts.empty()) Fail(ErrorKind::kConfig, "rnn lm: no training transcripts");
  if (options.epochs < 0 || !(options.learning_rate >= 0.0)) {
    Fail(ErrorKind::kConfig, "rnn lm: epochs and learning rate must be >= 0");
  }
  TinyRnnLm lm(num_phones, options.embed_dim, options.hidden_dim);
  lm.Initialize(options.seed);
  Rng rng(options.seed ^ 0x5EED5EEDULL);
  std::vector<std::size_t> order(transcripts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto params = lm.Params();
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.Shuffle(order);
    for (std::size_t idx : order) {
      for (Tensor *p : params) p->ZeroGrad();
      const double loss = lm.SequenceLoss(transcripts[idx], true);
      if (!std::isfinite(loss)) Fail(ErrorKind::kNumeric, "rnn lm: non-finite loss");
      double norm2 = 0.0;
      for (Tensor *p : params) {
        for (double g : std::as_const(*p).grad()) norm2 += g * g;
      }
      const double norm = std::sqrt(norm2);
      const double step = options.learning_rate *
                          (options.clip_norm > 0.0 && norm > options.clip_norm
                               ? options.clip_norm / norm
                               : 1.0);
      for (Tensor *p : params) {
        auto v = p->values();
        const auto g = std::as_const(*p).grad();
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= step * g[i];
      }
    }
  }
  for (Tensor *p : params) p->ClearGrad();
  return lm;
}

double Perplexity(const LmScorer &lm, std::span<const std::vector<int>> transcripts) {
  double total = 0.0;
  std::size_t events = 0;
  for (const auto &t : transcripts) {
    total += lm.Score(t);
    events += lm.NumEvents(t);
  }
  if (events == 0) Fail(ErrorKind::kConfig, "perplexity over zero events");
  return std::exp(-total / static_cast<double>(events));
}

}  // namespace pfsmn
