// pfsmn/train/corpus.h

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

#ifndef PFSMN_TRAIN_CORPUS_H_
#define PFSMN_TRAIN_CORPUS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfsmn/numeric/tensor.h"

namespace pfsmn {

struct Utterance {
  std::string id;
  Tensor features;              // T x F
  std::vector<int> phones;      // reference transcript
  std::vector<int> alignment;   // true pdf-id per frame
  int frames() const { return static_cast<int>(features.rows()); }
};

/// Synthetic HMM data: phone sequences, per-state durations and Gaussian
/// emissions around one mean vector per pdf-id.
struct GeneratorSpec {
  int num_phones = 5;
  int feature_dim = 8;
  int min_a_frames = 1;
  int max_a_frames = 4;
  int min_b_frames = 1;  // 0 allowed: state B is optional in the topology
  int max_b_frames = 4;
  int min_phones = 3;
  int max_phones = 6;
  double noise_stddev = 0.5;
  // Emission means are standard-normal draws, redrawn until every pair is at
  // least this far apart.
  double min_mean_distance = 2.5;
  // Probability that the next phone is (previous + 1) mod V instead of a
  // uniform draw.  0 gives the uniform phone prior.
  double bigram_skew = 0.0;
  std::uint64_t seed = 1;

  void Validate() const;
};

nlohmann::json ToJson(const GeneratorSpec &spec);
GeneratorSpec GeneratorSpecFromJson(const nlohmann::json &j);

struct Corpus {
  GeneratorSpec spec;
  Tensor means;  // num_pdfs x F
  std::vector<Utterance> utterances;
};

// Emission means for `spec` (a pure function of the spec).
Tensor GenerateMeans(const GeneratorSpec &spec);

// `n` utterances named "<prefix>0000", ...; utterance i uses a generator forked
// from (seed, stream, i), so the train and test streams are independent.
Corpus GenerateCorpus(const GeneratorSpec &spec, int n, std::uint64_t stream = 0,
                      const std::string &prefix = "utt");

// Binary file: "PFCO", u64 header length, JSON header {spec, means, count};
// then per utterance u64 length + JSON {id, phones, alignment} and the
// feature tensor in PFT1 format.
void WriteCorpus(std::ostream &os, const Corpus &corpus);
void WriteCorpus(const std::string &path, const Corpus &corpus);
Corpus ReadCorpus(std::istream &is);
Corpus ReadCorpus(const std::string &path);

std::vector<std::vector<int>> Transcripts(const Corpus &corpus);

}  // namespace pfsmn

#endif  // PFSMN_TRAIN_CORPUS_H_
