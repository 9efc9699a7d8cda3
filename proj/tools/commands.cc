// tools/commands.cc

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

#include "commands.h"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pfsmn/decode/decoder.h"
#include "pfsmn/decode/lm_scorer.h"
#include "pfsmn/decode/rescore.h"
#include "pfsmn/error.h"
#include "pfsmn/graph/graph.h"
#include "pfsmn/graph/phone_lm.h"
#include "pfsmn/graph/topology.h"
#include "pfsmn/net/checkpoint.h"
#include "pfsmn/net/config.h"
#include "pfsmn/net/network.h"
#include "pfsmn/numeric/rng.h"
#include "pfsmn/train/corpus.h"
#include "pfsmn/train/grad_suite.h"
#include "pfsmn/train/metrics.h"
#include "pfsmn/train/trainer.h"

namespace pfsmn::cli {

namespace {

using nlohmann::json;

json ReadJsonFile(const std::string &path) {
  std::ifstream is(path);
  if (!is) Fail(ErrorKind::kIo, "cannot open '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::exception &e) {
    Fail(ErrorKind::kFormat, path + ": " + e.what());
  }
}

// Writes to `path`, or stdout when it is empty.
void WriteText(const std::string &path, const std::string &text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  os << text;
  if (!os) Fail(ErrorKind::kIo, "failed writing '" + path + "'");
}

std::vector<int> ParsePhoneList(const std::string &text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      Fail(ErrorKind::kConfig, "bad phone id '" + item + "'");
    }
  }
  return out;
}

struct LoadedModel {
  Network network;
  PhoneLm den_lm;
  double acoustic_scale = 1.0;
};

LoadedModel LoadModel(const std::string &path) {
  LoadedCheckpoint ck = LoadCheckpoint(path);
  if (!ck.extras.contains("den_lm")) {
    Fail(ErrorKind::kFormat, path + ": checkpoint has no denominator LM");
  }
  LoadedModel m{std::move(ck.network), PhoneLm::FromJson(ck.extras.at("den_lm")), 1.0};
  if (ck.extras.contains("train_config")) {
    m.acoustic_scale = ck.extras["train_config"].value("acoustic_scale", 1.0);
  }
  return m;
}

std::unique_ptr<LmScorer> LoadLm(const std::string &path) {
  const json j = ReadJsonFile(path);
  const std::string type = j.value("type", std::string());
  if (type == "ngram") return std::make_unique<NGramLm>(PhoneLm::FromJson(j.at("model")));
  if (type == "rnn") return std::make_unique<TinyRnnLm>(TinyRnnLm::FromJson(j.at("model")));
  Fail(ErrorKind::kFormat, path + ": unknown LM type '" + type + "'");
}

std::string Csv(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

int RunGradcheck(const GradcheckArgs &a) {
  const auto entries = RunGradSuite(a.seed, a.seeds);
  std::string failed;
  for (const auto &e : entries) {
    std::printf("%-13s max_rel_err=%.3e tol=%.0e seeds=%d checked=%zu excluded=%zu %s\n",
                e.name.c_str(), e.max_rel_err, e.tol, e.seeds, e.checked, e.excluded,
                e.pass ? "PASS" : "FAIL");
    if (!e.pass && failed.empty()) failed = e.name + " (" + e.failure + ")";
  }
  std::fflush(stdout);
  if (!failed.empty()) Fail(ErrorKind::kNumeric, "gradient check failed: " + failed);
  return 0;
}

int RunGen(const GenArgs &a) {
  GeneratorSpec spec = a.spec.empty() ? GeneratorSpec{} : GeneratorSpecFromJson(ReadJsonFile(a.spec));
  if (a.seed) spec.seed = *a.seed;
  const Corpus corpus = GenerateCorpus(spec, a.count, a.stream, a.prefix);
  WriteCorpus(a.out, corpus);
  std::size_t frames = 0;
  for (const auto &u : corpus.utterances) frames += static_cast<std::size_t>(u.frames());
  std::cout << json{{"utterances", corpus.utterances.size()}, {"frames", frames},
                    {"spec", ToJson(spec)}}
                   .dump()
            << "\n";
  return 0;
}

int RunLm(const LmArgs &a) {
  const Corpus corpus = ReadCorpus(a.corpus);
  const auto transcripts = Transcripts(corpus);
  json out;
  if (a.type == "ngram") {
    const PhoneLm lm = PhoneLm::Estimate(transcripts, corpus.spec.num_phones, a.order);
    out = {{"type", "ngram"}, {"model", lm.ToJson()}};
    std::cerr << "train perplexity " << Perplexity(NGramLm(lm), transcripts) << "\n";
  } else {
    RnnLmOptions opts;
    opts.epochs = a.epochs;
    opts.seed = a.seed;
    const TinyRnnLm lm = TrainTinyRnnLm(transcripts, corpus.spec.num_phones, opts);
    out = {{"type", "rnn"}, {"model", lm.ToJson()}};
    std::cerr << "train perplexity " << Perplexity(lm, transcripts) << "\n";
  }
  WriteText(a.out, out.dump() + "\n");
  return 0;
}

int RunTrain(const TrainArgs &a) {
  const Corpus corpus = ReadCorpus(a.corpus);
  json model = a.model.empty() ? json{{"preset", "desk"}} : ReadJsonFile(a.model);
  if (!model.contains("input_dim")) model["input_dim"] = corpus.spec.feature_dim;
  if (!model.contains("output_dim")) model["output_dim"] = NumPdfs(corpus.spec.num_phones);
  const NetworkConfig cfg = NetworkConfigFromJson(model);
  TrainConfig tc = a.config.empty() ? TrainConfig{} : TrainConfigFromJson(ReadJsonFile(a.config));
  if (a.seed) tc.seed = *a.seed;
  if (a.epochs) tc.epochs = *a.epochs;

  Network net(cfg);
  Rng rng(tc.seed);
  net.Initialize(rng);

  std::ofstream history;
  if (!a.history.empty()) {
    history.open(a.history, std::ios::binary);
    if (!history) Fail(ErrorKind::kIo, "cannot open '" + a.history + "' for writing");
  }
  const TrainResult result = Train(net, corpus, tc, [&](const EpochStats &s) {
    const std::string line = ToJson(s).dump();
    std::cerr << line << "\n";
    if (history.is_open()) history << line << "\n" << std::flush;
  });
  SaveCheckpoint(a.out, net,
                 json{{"den_lm", result.den_lm.ToJson()},
                      {"train_config", ToJson(tc)},
                      {"num_phones", corpus.spec.num_phones}});
  return 0;
}

int RunEval(const EvalArgs &a) {
  const LoadedModel m = LoadModel(a.checkpoint);
  const Corpus corpus = ReadCorpus(a.corpus);
  DenominatorCache den(m.den_lm);
  const Metrics metrics = Evaluate(m.network, corpus, den, m.acoustic_scale);
  WriteText(a.out, ToJson(metrics).dump(2) + "\n");
  return 0;
}

int RunDecode(const DecodeArgs &a) {
  const LoadedModel m = LoadModel(a.checkpoint);
  const Corpus corpus = ReadCorpus(a.corpus);
  DenominatorCache den(m.den_lm);
  json out = json::array();
  for (const auto &utt : corpus.utterances) {
    const NetworkActivations acts = m.network.Forward(utt.features);
    const auto hyps =
        NBest(den.Get(utt.frames()), acts.chain_output, m.acoustic_scale, a.nbest, a.beam);
    out.push_back({{"id", utt.id}, {"reference", utt.phones}, {"hyps", ToJson(hyps)}});
  }
  WriteText(a.out, out.dump(1) + "\n");
  return 0;
}

int RunRescore(const RescoreArgs &a) {
  const json input = ReadJsonFile(a.nbest);
  if (!input.is_array()) Fail(ErrorKind::kFormat, a.nbest + ": expected a JSON array");
  std::vector<NBestEntry> entries;
  std::vector<std::string> ids;
  try {
    for (const auto &u : input) {
      ids.push_back(u.at("id").get<std::string>());
      entries.push_back({u.at("reference").get<std::vector<int>>(), HypothesesFromJson(u.at("hyps"))});
    }
  } catch (const json::exception &e) {
    Fail(ErrorKind::kFormat, a.nbest + ": " + e.what());
  }
  if (entries.empty()) Fail(ErrorKind::kConfig, a.nbest + ": no utterances");

  std::unique_ptr<LmScorer> shared;
  std::vector<ReferencePenaltyLm> oracles;
  LmForUtterance lm_for;
  std::string lm_name;
  if (a.lm == "oracle") {
    for (const auto &e : entries) oracles.emplace_back(e.reference);
    lm_for = [&](std::size_t i) -> const LmScorer & { return oracles[i]; };
    lm_name = "oracle";
  } else {
    shared = LoadLm(a.lm);
    lm_for = [&](std::size_t) -> const LmScorer & { return *shared; };
    lm_name = shared->Name();
  }
  const std::vector<double> grid = a.lmwt.empty() ? DefaultLmwtGrid() : a.lmwt;
  const auto sweep = SweepLmwt(entries, lm_for, grid);
  json out = {{"lm", lm_name}, {"oracle_accuracy", OracleAccuracy(entries)}};
  out["sweep"] = json::array();
  for (const auto &p : sweep) out["sweep"].push_back(ToJson(p));
  if (grid.size() == 1) {
    out["utterances"] = json::array();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out["utterances"].push_back({{"id", ids[i]},
                                   {"reference", entries[i].reference},
                                   {"hyps", ToJson(Rescore(entries[i].hyps, lm_for(i), grid[0]))}});
    }
  }
  WriteText(a.out, out.dump(1) + "\n");
  return 0;
}

int RunInspect(const InspectArgs &a) {
  if (!a.checkpoint.empty()) {
    const LoadedCheckpoint ck = LoadCheckpoint(a.checkpoint);
    const NetworkConfig &cfg = ck.network.config();
    const ReceptiveField rf = ComputeReceptiveField(cfg);
    json params = json::array();
    for (std::size_t i = 0; i < ck.network.params().size(); ++i) {
      params.push_back({{"name", ck.network.param_names()[i]},
                        {"shape", ck.network.params()[i].shape()}});
    }
    std::cout << json{{"config", ToJson(cfg)},
                      {"config_hash", HashToHex(ConfigHash(cfg))},
                      {"param_count", ck.network.NumParams()},
                      {"receptive_field", {{"past", rf.past}, {"future", rf.future}}},
                      {"params", params},
                      {"extras", ck.extras}}
                     .dump(2)
              << "\n";
    return 0;
  }
  if (!a.config.empty()) {
    const NetworkConfig cfg = NetworkConfigFromJson(ReadJsonFile(a.config));
    Validate(cfg);
    const ReceptiveField rf = ComputeReceptiveField(cfg);
    std::cout << json{{"config", ToJson(cfg)},
                      {"config_hash", HashToHex(ConfigHash(cfg))},
                      {"param_count", ParamCount(cfg)},
                      {"skip_junctions", CountSkipJunctions(cfg)},
                      {"receptive_field", {{"past", rf.past}, {"future", rf.future}}}}
                     .dump(2)
              << "\n";
    return 0;
  }
  if (a.graph.empty()) {
    Fail(ErrorKind::kConfig, "inspect needs one of --checkpoint, --config or --graph");
  }
  std::optional<PhoneLm> lm;
  if (!a.lm.empty()) {
    const json j = ReadJsonFile(a.lm);
    if (j.value("type", std::string()) != "ngram") {
      Fail(ErrorKind::kConfig, a.lm + ": graph construction needs an n-gram LM");
    }
    lm = PhoneLm::FromJson(j.at("model"));
  }
  Graph g;
  if (a.graph == "den") {
    if (!lm) Fail(ErrorKind::kConfig, "--graph den needs --lm");
    g = a.frames > 0 ? BuildDenominatorGraph(*lm, a.frames) : BuildCompactDenominator(*lm);
  } else {
    const int num_phones = lm ? lm->num_phones() : a.num_phones;
    if (num_phones < 1) Fail(ErrorKind::kConfig, "--graph num needs --num-phones or --lm");
    const std::vector<int> phones = ParsePhoneList(a.phones);
    const PhoneLm *lm_ptr = lm ? &*lm : nullptr;
    g = a.frames > 0 ? BuildNumeratorGraph(phones, a.frames, num_phones, lm_ptr)
                     : BuildCompactNumerator(phones, num_phones, lm_ptr);
  }
  WriteGraphText(std::cout, g);
  return 0;
}

int RunCurves(const CurvesArgs &a) {
  std::ostringstream os;
  if (!a.history.empty()) {
    std::ifstream is(a.history);
    if (!is) Fail(ErrorKind::kIo, "cannot open '" + a.history + "'");
    os << "epoch,learning_rate,objective,lfmmi,ce,l2,frame_accuracy\n";
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      try {
        const json j = json::parse(line);
        os << j.at("epoch").get<int>() << "," << Csv(j.at("learning_rate").get<double>()) << ","
           << Csv(j.at("objective").get<double>()) << "," << Csv(j.at("lfmmi").get<double>())
           << "," << Csv(j.at("ce").get<double>()) << "," << Csv(j.at("l2").get<double>()) << ","
           << Csv(j.at("frame_accuracy").get<double>()) << "\n";
      } catch (const json::exception &e) {
        Fail(ErrorKind::kFormat, a.history + ": " + e.what());
      }
    }
  } else if (!a.sweep.empty()) {
    const json j = ReadJsonFile(a.sweep);
    os << "lmwt,phone_error,top1_accuracy\n";
    try {
      for (const auto &p : j.at("sweep")) {
        os << Csv(p.at("lmwt").get<double>()) << "," << Csv(p.at("phone_error").get<double>())
           << "," << Csv(p.at("top1_accuracy").get<double>()) << "\n";
      }
    } catch (const json::exception &e) {
      Fail(ErrorKind::kFormat, a.sweep + ": " + e.what());
    }
  } else {
    Fail(ErrorKind::kConfig, "curves needs --history or --sweep");
  }
  WriteText(a.out, os.str());
  return 0;
}

}  // namespace pfsmn::cli
