// tools/commands.h

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

#ifndef PFSMN_TOOLS_COMMANDS_H_
#define PFSMN_TOOLS_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pfsmn::cli {

struct GradcheckArgs {
  std::uint64_t seed = 1;
  int seeds = 20;
};

struct GenArgs {
  std::string spec;  // optional JSON file
  int count = 100;
  std::uint64_t stream = 0;
  std::optional<std::uint64_t> seed;
  std::string prefix = "utt";
  std::string out;
};

struct LmArgs {
  std::string corpus;
  std::string type = "ngram";
  int order = 4;
  int epochs = 10;
  std::uint64_t seed = 1;
  std::string out;
};

struct TrainArgs {
  std::string corpus;
  std::string model;   // optional network config JSON
  std::string config;  // optional train config JSON
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::string out;
  std::string history;
};

struct EvalArgs {
  std::string checkpoint;
  std::string corpus;
  std::string out;
};

struct DecodeArgs {
  std::string checkpoint;
  std::string corpus;
  int nbest = 1;
  int beam = 200;
  std::string out;
};

struct RescoreArgs {
  std::string nbest;
  std::string lm;  // LM file or "oracle"
  std::vector<double> lmwt;
  std::string out;
};

struct InspectArgs {
  std::string checkpoint;
  std::string config;
  std::string graph;  // "num" or "den"
  std::string phones;
  int frames = 0;
  int num_phones = 0;
  std::string lm;
  bool compact = false;
};

struct CurvesArgs {
  std::string history;
  std::string sweep;
  std::string out;
};

int RunGradcheck(const GradcheckArgs &a);
int RunGen(const GenArgs &a);
int RunLm(const LmArgs &a);
int RunTrain(const TrainArgs &a);
int RunEval(const EvalArgs &a);
int RunDecode(const DecodeArgs &a);
int RunRescore(const RescoreArgs &a);
int RunInspect(const InspectArgs &a);
int RunCurves(const CurvesArgs &a);

}  // namespace pfsmn::cli

#endif  // PFSMN_TOOLS_COMMANDS_H_
