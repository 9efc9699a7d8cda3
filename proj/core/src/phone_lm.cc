// phone_lm.cc

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

#include "pfsmn/graph/phone_lm.h"

#include <cmath>

#include "pfsmn/error.h"
#include "pfsmn/numeric/ops.h"

namespace pfsmn {

namespace {

PhoneLm::History Truncate(PhoneLm::History h, int max_len) {
  if (static_cast<int>(h.size()) > max_len) {
    h.erase(h.begin(), h.end() - max_len);
  }
  return h;
}

}  // namespace

PhoneLm PhoneLm::Estimate(std::span<const std::vector<int>> transcripts, int num_phones,
                          int order, double add_k) {
  if (num_phones <= 0) Fail(ErrorKind::kConfig, "phone LM needs a non-empty vocabulary");
  if (order < 1) Fail(ErrorKind::kConfig, "phone LM order must be >= 1");
  if (add_k <= 0.0) Fail(ErrorKind::kConfig, "add-k smoothing constant must be positive");
  const int max_hist = order - 1;
  std::map<History, std::vector<double>> counts;
  counts[History{}].assign(static_cast<std::size_t>(num_phones), 0.0);
  for (const auto &sentence : transcripts) {
    History full{kSentenceStart};
    for (int p : sentence) {
      if (p < 0 || p >= num_phones) {
        Fail(ErrorKind::kConfig, "transcript phone " + std::to_string(p) +
                                     " outside the vocabulary");
      }
      const History h = Truncate(full, max_hist);
      for (std::size_t len = 0; len <= h.size(); ++len) {
        History suffix(h.end() - static_cast<long>(len), h.end());
        auto &row = counts[suffix];
        if (row.empty()) row.assign(static_cast<std::size_t>(num_phones), 0.0);
        row[static_cast<std::size_t>(p)] += 1.0;
      }
      full.push_back(p);
    }
  }
  PhoneLm lm;
  lm.order_ = order;
  lm.num_phones_ = num_phones;
  lm.add_k_ = add_k;
  for (const auto &[history, row] : counts) {
    double total = 0.0;
    for (double c : row) total += c;
    std::vector<double> logp(row.size());
    const double denom = total + add_k * num_phones;
    for (std::size_t p = 0; p < row.size(); ++p) logp[p] = std::log((row[p] + add_k) / denom);
    lm.contexts_.emplace(history, std::move(logp));
  }
  lm.CheckNormalized();
  return lm;
}

PhoneLm PhoneLm::Uniform(int num_phones) {
  if (num_phones <= 0) Fail(ErrorKind::kConfig, "phone LM needs a non-empty vocabulary");
  PhoneLm lm;
  lm.order_ = 1;
  lm.num_phones_ = num_phones;
  lm.add_k_ = 0.0;
  lm.contexts_.emplace(History{},
                       std::vector<double>(static_cast<std::size_t>(num_phones),
                                           -std::log(static_cast<double>(num_phones))));
  return lm;
}

const PhoneLm::History &PhoneLm::Resolve(const History &history) const {
  History h = Truncate(history, order_ - 1);
  while (true) {
    auto it = contexts_.find(h);
    if (it != contexts_.end()) return it->first;
    if (h.empty()) break;
    h.erase(h.begin());
  }
  Fail(ErrorKind::kConfig, "phone LM has no unigram context");
}

const PhoneLm::History &PhoneLm::StartContext() const {
  return Resolve(History{kSentenceStart});
}

const PhoneLm::History &PhoneLm::Next(const History &context, int phone) const {
  History h = context;
  h.push_back(phone);
  return Resolve(h);
}

double PhoneLm::LogProb(const History &context, int phone) const {
  if (phone < 0 || phone >= num_phones_) {
    Fail(ErrorKind::kConfig, "phone " + std::to_string(phone) + " outside the vocabulary");
  }
  return contexts_.at(Resolve(context))[static_cast<std::size_t>(phone)];
}

double PhoneLm::ScoreSequence(std::span<const int> phones) const {
  History context = StartContext();
  double total = 0.0;
  for (int p : phones) {
    total += LogProb(context, p);
    context = Next(context, p);
  }
  return total;
}

void PhoneLm::CheckNormalized() const {
  for (const auto &[history, logp] : contexts_) {
    if (std::abs(std::exp(LogSumExp(logp)) - 1.0) > 1e-9) {
      Fail(ErrorKind::kNumeric, "phone LM context is not normalized");
    }
  }
}

nlohmann::json PhoneLm::ToJson() const {
  nlohmann::json j;
  j["order"] = order_;
  j["num_phones"] = num_phones_;
  j["add_k"] = add_k_;
  auto &contexts = j["contexts"] = nlohmann::json::array();
  for (const auto &[history, logp] : contexts_) {
    contexts.push_back({{"history", history}, {"logprobs", logp}});
  }
  return j;
}

PhoneLm PhoneLm::FromJson(const nlohmann::json &j) {
  try {
    PhoneLm lm;
    lm.order_ = j.at("order").get<int>();
    lm.num_phones_ = j.at("num_phones").get<int>();
    lm.add_k_ = j.value("add_k", 0.0);
    for (const auto &c : j.at("contexts")) {
      auto logp = c.at("logprobs").get<std::vector<double>>();
      if (static_cast<int>(logp.size()) != lm.num_phones_) {
        Fail(ErrorKind::kFormat, "phone LM context has the wrong vocabulary size");
      }
      lm.contexts_.emplace(c.at("history").get<History>(), std::move(logp));
    }
    if (!lm.contexts_.contains(History{})) {
      Fail(ErrorKind::kFormat, "phone LM lacks a unigram context");
    }
    lm.CheckNormalized();
    return lm;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kFormat, std::string("phone LM: ") + e.what());
  }
}

}  // namespace pfsmn
