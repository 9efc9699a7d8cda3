// pfsmn/graph/topology.h

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

#ifndef PFSMN_GRAPH_TOPOLOGY_H_
#define PFSMN_GRAPH_TOPOLOGY_H_

#include <span>
#include <vector>

#include "pfsmn/graph/graph.h"
#include "pfsmn/graph/phone_lm.h"

namespace pfsmn {

// Two pdf-ids per phone: the entry state A = 2p (mandatory, self-loop) and the
// optional state B = 2p + 1 (self-loop).  Transition weights are uniform over
// each state's out-transitions, counting the exit: A has three (self, to B,
// exit), B has two (self, exit).
inline int EntryPdf(int phone) { return 2 * phone; }
inline int SecondPdf(int phone) { return 2 * phone + 1; }
inline int PhoneOfPdf(int pdf) { return pdf / 2; }
inline bool IsEntryPdf(int pdf) { return pdf % 2 == 0; }
inline int NumPdfs(int num_phones) { return 2 * num_phones; }

double EntryStateLogWeight();   // log(1/3)
double SecondStateLogWeight();  // log(1/2)

// Phones read off a frame-level pdf sequence: a new phone starts at every
// entry pdf that does not continue the same entry pdf's self-loop.  A phone
// repeated without visiting its B state is indistinguishable from a single
// longer token and collapses into one.
std::vector<int> PdfsToPhones(std::span<const int> pdfs);

// Per-frame pdf alignment for a phone sequence with explicit state durations
// (a_frames[i] >= 1, b_frames[i] >= 0).
std::vector<int> AlignmentFromDurations(std::span<const int> phones,
                                        std::span<const int> a_frames,
                                        std::span<const int> b_frames);

// Compact (cyclic) single-phone HMM: entry state 0, A = 1, B = 2.
Graph BuildPhoneHmm(int phone, int num_phones);

// Compact concatenation of phone HMMs.  With an LM, the arc entering phone i
// also carries log P(p_i | history).
Graph BuildCompactNumerator(std::span<const int> phones, int num_phones,
                            const PhoneLm *lm = nullptr);
// Numerator unrolled to exactly `frames` frames.  Throws kInfeasible when
// phones.size() > frames.
Graph BuildNumeratorGraph(std::span<const int> phones, int frames, int num_phones,
                          const PhoneLm *lm = nullptr);

// LM acceptor composed with the phone HMMs: states are (LM context after the
// current phone, current phone, A|B) plus a start state.
Graph BuildCompactDenominator(const PhoneLm &lm);
Graph BuildDenominatorGraph(const PhoneLm &lm, int frames);

}  // namespace pfsmn

#endif  // PFSMN_GRAPH_TOPOLOGY_H_
