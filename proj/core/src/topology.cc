// topology.cc

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

#include "pfsmn/graph/topology.h"

#include <cmath>
#include <map>
#include <tuple>

#include "pfsmn/error.h"

namespace pfsmn {

namespace {

void CheckPhone(int phone, int num_phones) {
  if (phone < 0 || phone >= num_phones) {
    Fail(ErrorKind::kConfig, "unknown phone " + std::to_string(phone) +
                                 " (vocabulary has " + std::to_string(num_phones) + ")");
  }
}

}  // namespace

double EntryStateLogWeight() { return -std::log(3.0); }
double SecondStateLogWeight() { return -std::log(2.0); }

std::vector<int> PdfsToPhones(std::span<const int> pdfs) {
  std::vector<int> phones;
  for (std::size_t t = 0; t < pdfs.size(); ++t) {
    if (IsEntryPdf(pdfs[t]) && (t == 0 || pdfs[t - 1] != pdfs[t])) {
      phones.push_back(PhoneOfPdf(pdfs[t]));
    }
  }
  return phones;
}

std::vector<int> AlignmentFromDurations(std::span<const int> phones,
                                        std::span<const int> a_frames,
                                        std::span<const int> b_frames) {
  if (phones.size() != a_frames.size() || phones.size() != b_frames.size()) {
    Fail(ErrorKind::kConfig, "durations do not match the phone sequence");
  }
  std::vector<int> pdfs;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    if (a_frames[i] < 1 || b_frames[i] < 0) {
      Fail(ErrorKind::kConfig, "state A needs >= 1 frame and state B >= 0");
    }
    pdfs.insert(pdfs.end(), static_cast<std::size_t>(a_frames[i]), EntryPdf(phones[i]));
    pdfs.insert(pdfs.end(), static_cast<std::size_t>(b_frames[i]), SecondPdf(phones[i]));
  }
  return pdfs;
}

Graph BuildPhoneHmm(int phone, int num_phones) {
  CheckPhone(phone, num_phones);
  const double wa = EntryStateLogWeight(), wb = SecondStateLogWeight();
  Graph g;
  const int entry = g.AddState(), a = g.AddState(), b = g.AddState();
  g.start = entry;
  g.AddArc(entry, a, EntryPdf(phone), 0.0);
  g.AddArc(a, a, EntryPdf(phone), wa);
  g.AddArc(a, b, SecondPdf(phone), wa);
  g.AddArc(b, b, SecondPdf(phone), wb);
  g.SetFinal(a, wa);
  g.SetFinal(b, wb);
  return g;
}

Graph BuildCompactNumerator(std::span<const int> phones, int num_phones,
                            const PhoneLm *lm) {
  if (phones.empty()) Fail(ErrorKind::kInfeasible, "numerator needs at least one phone");
  for (int p : phones) CheckPhone(p, num_phones);
  if (lm != nullptr && lm->num_phones() != num_phones) {
    Fail(ErrorKind::kConfig, "phone LM vocabulary does not match the numerator");
  }
  const double wa = EntryStateLogWeight(), wb = SecondStateLogWeight();
  Graph g;
  g.start = g.AddState();
  PhoneLm::History context;
  if (lm != nullptr) context = lm->StartContext();
  int prev_a = -1, prev_b = -1;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    const int p = phones[i];
    double lm_weight = 0.0;
    if (lm != nullptr) {
      lm_weight = lm->LogProb(context, p);
      context = lm->Next(context, p);
    }
    const int a = g.AddState(), b = g.AddState();
    if (i == 0) {
      g.AddArc(g.start, a, EntryPdf(p), lm_weight);
    } else {
      g.AddArc(prev_a, a, EntryPdf(p), wa + lm_weight);
      g.AddArc(prev_b, a, EntryPdf(p), wb + lm_weight);
    }
    g.AddArc(a, a, EntryPdf(p), wa);
    g.AddArc(a, b, SecondPdf(p), wa);
    g.AddArc(b, b, SecondPdf(p), wb);
    prev_a = a;
    prev_b = b;
  }
  g.SetFinal(prev_a, wa);
  g.SetFinal(prev_b, wb);
  return g;
}

Graph BuildNumeratorGraph(std::span<const int> phones, int frames, int num_phones,
                          const PhoneLm *lm) {
  if (static_cast<int>(phones.size()) > frames) {
    Fail(ErrorKind::kInfeasible, "cannot align " + std::to_string(phones.size()) +
                                     " phones to " + std::to_string(frames) + " frames");
  }
  return Unroll(BuildCompactNumerator(phones, num_phones, lm), frames);
}

Graph BuildCompactDenominator(const PhoneLm &lm) {
  const int num_phones = lm.num_phones();
  if (num_phones <= 0) Fail(ErrorKind::kConfig, "denominator needs a non-empty vocabulary");
  const double wa = EntryStateLogWeight(), wb = SecondStateLogWeight();

  Graph g;
  g.start = g.AddState();
  // (context after the phone, phone) -> A state id; B is A + 1.
  std::map<std::pair<PhoneLm::History, int>, int> ids;
  std::vector<std::pair<PhoneLm::History, int>> pending;
  auto entry_state = [&](const PhoneLm::History &context, int phone) {
    auto key = std::make_pair(context, phone);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const int a = g.AddState();
    g.AddState();
    ids.emplace(key, a);
    pending.push_back(key);
    return a;
  };
  auto add_entries = [&](int from, const PhoneLm::History &context, double exit_weight) {
    for (int q = 0; q < num_phones; ++q) {
      const int a = entry_state(lm.Next(context, q), q);
      g.AddArc(from, a, EntryPdf(q), exit_weight + lm.LogProb(context, q));
    }
  };

  add_entries(g.start, lm.StartContext(), 0.0);
  for (std::size_t k = 0; k < pending.size(); ++k) {
    const auto [context, phone] = pending[k];
    const int a = ids.at(pending[k]);
    const int b = a + 1;
    g.AddArc(a, a, EntryPdf(phone), wa);
    g.AddArc(a, b, SecondPdf(phone), wa);
    g.AddArc(b, b, SecondPdf(phone), wb);
    add_entries(a, context, wa);
    add_entries(b, context, wb);
    g.SetFinal(a, wa);
    g.SetFinal(b, wb);
  }
  return g;
}

Graph BuildDenominatorGraph(const PhoneLm &lm, int frames) {
  return Unroll(BuildCompactDenominator(lm), frames);
}

}  // namespace pfsmn
