// corpus.cc

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

#include "pfsmn/train/corpus.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "pfsmn/error.h"
#include "pfsmn/graph/topology.h"
#include "pfsmn/numeric/rng.h"
#include "pfsmn/numeric/tensor_io.h"

namespace pfsmn {

namespace {

constexpr char kMagic[] = "PFCO";
constexpr std::uint64_t kMaxRecordBytes = 1ULL << 30;

std::string ReadRecord(std::istream &is) {
  const std::uint64_t n = ReadU64(is);
  if (n > kMaxRecordBytes) Fail(ErrorKind::kFormat, "corpus record length is implausible");
  return ReadBytes(is, static_cast<std::size_t>(n));
}

std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b) {
  Rng r(a ^ (b * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL));
  return r.NextU64();
}

void RequireRange(int lo, int hi, int min_lo, const char *what) {
  if (lo < min_lo || hi < lo) {
    Fail(ErrorKind::kConfig, std::string("generator: bad ") + what + " range [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace

void GeneratorSpec::Validate() const {
  if (num_phones < 1) Fail(ErrorKind::kConfig, "generator: num_phones must be >= 1");
  if (feature_dim < 1) Fail(ErrorKind::kConfig, "generator: feature_dim must be >= 1");
  RequireRange(min_a_frames, max_a_frames, 1, "state-A duration");
  RequireRange(min_b_frames, max_b_frames, 0, "state-B duration");
  RequireRange(min_phones, max_phones, 1, "sentence length");
  if (!(noise_stddev >= 0.0)) Fail(ErrorKind::kConfig, "generator: noise stddev must be >= 0");
  if (!(min_mean_distance >= 0.0)) {
    Fail(ErrorKind::kConfig, "generator: min_mean_distance must be >= 0");
  }
  if (!(bigram_skew >= 0.0 && bigram_skew <= 1.0)) {
    Fail(ErrorKind::kConfig, "generator: bigram_skew must be in [0, 1]");
  }
}

nlohmann::json ToJson(const GeneratorSpec &s) {
  return {{"num_phones", s.num_phones},       {"feature_dim", s.feature_dim},
          {"min_a_frames", s.min_a_frames},   {"max_a_frames", s.max_a_frames},
          {"min_b_frames", s.min_b_frames},   {"max_b_frames", s.max_b_frames},
          {"min_phones", s.min_phones},       {"max_phones", s.max_phones},
          {"noise_stddev", s.noise_stddev},   {"min_mean_distance", s.min_mean_distance},
          {"bigram_skew", s.bigram_skew},     {"seed", s.seed}};
}

GeneratorSpec GeneratorSpecFromJson(const nlohmann::json &j) {
  GeneratorSpec s;
  if (!j.is_object()) Fail(ErrorKind::kConfig, "generator spec must be a JSON object");
  for (const auto &[key, value] : j.items()) {
    try {
      if (key == "num_phones") s.num_phones = value.get<int>();
      else if (key == "feature_dim") s.feature_dim = value.get<int>();
      else if (key == "min_a_frames") s.min_a_frames = value.get<int>();
      else if (key == "max_a_frames") s.max_a_frames = value.get<int>();
      else if (key == "min_b_frames") s.min_b_frames = value.get<int>();
      else if (key == "max_b_frames") s.max_b_frames = value.get<int>();
      else if (key == "min_phones") s.min_phones = value.get<int>();
      else if (key == "max_phones") s.max_phones = value.get<int>();
      else if (key == "noise_stddev") s.noise_stddev = value.get<double>();
      else if (key == "min_mean_distance") s.min_mean_distance = value.get<double>();
      else if (key == "bigram_skew") s.bigram_skew = value.get<double>();
      else if (key == "seed") s.seed = value.get<std::uint64_t>();
      else Fail(ErrorKind::kConfig, "generator spec: unknown key '" + key + "'");
    } catch (const nlohmann::json::exception &e) {
      Fail(ErrorKind::kConfig, "generator spec: bad value for '" + key + "': " + e.what());
    }
  }
  s.Validate();
  return s;
}

Tensor GenerateMeans(const GeneratorSpec &spec) {
  spec.Validate();
  const std::size_t p = static_cast<std::size_t>(NumPdfs(spec.num_phones));
  const std::size_t f = static_cast<std::size_t>(spec.feature_dim);
  Tensor means({p, f});
  Rng rng(MixSeed(spec.seed, 0xA11CE));
  constexpr int kMaxDraws = 100000;
  for (std::size_t i = 0; i < p; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < kMaxDraws && !ok; ++attempt) {
      for (std::size_t d = 0; d < f; ++d) means.at(i, d) = rng.Normal();
      ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        double dist2 = 0.0;
        for (std::size_t d = 0; d < f; ++d) {
          const double diff = means.at(i, d) - means.at(j, d);
          dist2 += diff * diff;
        }
        ok = std::sqrt(dist2) >= spec.min_mean_distance;
      }
    }
    if (!ok) {
      Fail(ErrorKind::kConfig, "generator: cannot place " + std::to_string(p) +
                                   " means at distance >= " +
                                   std::to_string(spec.min_mean_distance));
    }
  }
  return means;
}

Corpus GenerateCorpus(const GeneratorSpec &spec, int n, std::uint64_t stream,
                      const std::string &prefix) {
  if (n < 0) Fail(ErrorKind::kConfig, "generator: negative utterance count");
  Corpus corpus;
  corpus.spec = spec;
  corpus.means = GenerateMeans(spec);
  const std::size_t f = static_cast<std::size_t>(spec.feature_dim);
  const std::uint64_t stream_seed = MixSeed(spec.seed, stream + 1);
  for (int u = 0; u < n; ++u) {
    Rng rng(MixSeed(stream_seed, static_cast<std::uint64_t>(u)));
    Utterance utt;
    char name[32];
    std::snprintf(name, sizeof(name), "%04d", u);
    utt.id = prefix + name;
    const int len = rng.UniformRange(spec.min_phones, spec.max_phones);
    std::vector<int> a_frames, b_frames;
    for (int i = 0; i < len; ++i) {
      int phone;
      if (i > 0 && spec.bigram_skew > 0.0 && rng.Uniform() < spec.bigram_skew) {
        phone = (utt.phones.back() + 1) % spec.num_phones;
      } else {
        phone = rng.UniformRange(0, spec.num_phones - 1);
      }
      utt.phones.push_back(phone);
      a_frames.push_back(rng.UniformRange(spec.min_a_frames, spec.max_a_frames));
      b_frames.push_back(rng.UniformRange(spec.min_b_frames, spec.max_b_frames));
    }
    utt.alignment = AlignmentFromDurations(utt.phones, a_frames, b_frames);
    const std::size_t frames = utt.alignment.size();
    utt.features = Tensor({frames, f});
    for (std::size_t t = 0; t < frames; ++t) {
      const auto pdf = static_cast<std::size_t>(utt.alignment[t]);
      for (std::size_t d = 0; d < f; ++d) {
        utt.features.at(t, d) = corpus.means.at(pdf, d) + spec.noise_stddev * rng.Normal();
      }
    }
    corpus.utterances.push_back(std::move(utt));
  }
  return corpus;
}

void WriteCorpus(std::ostream &os, const Corpus &corpus) {
  nlohmann::json header = {{"spec", ToJson(corpus.spec)},
                           {"count", corpus.utterances.size()},
                           {"means", corpus.means.values()}};
  const std::string text = header.dump();
  WriteBytes(os, kMagic);
  WriteU64(os, text.size());
  WriteBytes(os, text);
  for (const auto &utt : corpus.utterances) {
    const std::string rec =
        nlohmann::json{{"id", utt.id}, {"phones", utt.phones}, {"alignment", utt.alignment}}
            .dump();
    WriteU64(os, rec.size());
    WriteBytes(os, rec);
    WriteTensor(os, utt.features);
  }
  if (!os) Fail(ErrorKind::kIo, "failed writing corpus");
}

void WriteCorpus(const std::string &path, const Corpus &corpus) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  WriteCorpus(os, corpus);
}

Corpus ReadCorpus(std::istream &is) {
  if (ReadBytes(is, 4) != kMagic) Fail(ErrorKind::kFormat, "not a corpus file (bad magic)");
  Corpus corpus;
  std::size_t count = 0;
  try {
    const auto header = nlohmann::json::parse(ReadRecord(is));
    corpus.spec = GeneratorSpecFromJson(header.at("spec"));
    count = header.at("count").get<std::size_t>();
    const auto means = header.at("means").get<std::vector<double>>();
    corpus.means = Tensor({static_cast<std::size_t>(NumPdfs(corpus.spec.num_phones)),
                           static_cast<std::size_t>(corpus.spec.feature_dim)},
                          means);
    for (std::size_t i = 0; i < count; ++i) {
      const auto rec = nlohmann::json::parse(ReadRecord(is));
      Utterance utt;
      utt.id = rec.at("id").get<std::string>();
      utt.phones = rec.at("phones").get<std::vector<int>>();
      utt.alignment = rec.at("alignment").get<std::vector<int>>();
      utt.features = ReadTensor(is);
      if (utt.features.rank() != 2 || utt.features.rows() != utt.alignment.size()) {
        Fail(ErrorKind::kFormat, "utterance " + utt.id + ": features do not match alignment");
      }
      corpus.utterances.push_back(std::move(utt));
    }
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kFormat, std::string("corpus: ") + e.what());
  }
  return corpus;
}

Corpus ReadCorpus(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorKind::kIo, "cannot open corpus '" + path + "'");
  return ReadCorpus(is);
}

std::vector<std::vector<int>> Transcripts(const Corpus &corpus) {
  std::vector<std::vector<int>> out;
  for (const auto &u : corpus.utterances) out.push_back(u.phones);
  return out;
}

}  // namespace pfsmn
