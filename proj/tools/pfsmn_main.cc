// tools/pfsmn_main.cc

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

#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <string_view>

#include <CLI11.hpp>

#include "commands.h"
#include "pfsmn/error.h"

namespace {

constexpr int kUsageExit = 2;
constexpr int kFailureExit = 1;

std::string OneLine(std::string s) {
  for (char &c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char **argv) {
  using namespace pfsmn::cli;
  CLI::App app{"pfsmn: CNN + pyramidal FSMN acoustic models trained with LF-MMI"};
  app.require_subcommand(1);
  std::function<int()> run;

  GradcheckArgs gc;
  auto *gradcheck = app.add_subcommand("gradcheck", "Run the finite-difference gradient suite");
  gradcheck->add_option("--seed", gc.seed, "First seed");
  gradcheck->add_option("--seeds", gc.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  gradcheck->callback([&] { run = [&] { return RunGradcheck(gc); }; });

  GenArgs gen;
  auto *g = app.add_subcommand("gen", "Generate a synthetic corpus");
  g->add_option("--spec", gen.spec, "Generator spec JSON (defaults if omitted)");
  g->add_option("--count", gen.count, "Number of utterances")->check(CLI::NonNegativeNumber);
  g->add_option("--stream", gen.stream, "Stream index (use different streams for train/test)");
  g->add_option("--seed", gen.seed, "Override the spec seed");
  g->add_option("--prefix", gen.prefix, "Utterance id prefix");
  g->add_option("--out", gen.out, "Output corpus file")->required();
  g->callback([&] { run = [&] { return RunGen(gen); }; });

  LmArgs lm;
  auto *l = app.add_subcommand("lm", "Train a phone LM for rescoring");
  l->add_option("--corpus", lm.corpus, "Training corpus")->required();
  l->add_option("--type", lm.type, "ngram or rnn")->check(CLI::IsMember({"ngram", "rnn"}));
  l->add_option("--order", lm.order, "n-gram order")->check(CLI::PositiveNumber);
  l->add_option("--epochs", lm.epochs, "RNN training epochs")->check(CLI::NonNegativeNumber);
  l->add_option("--seed", lm.seed, "RNN seed");
  l->add_option("--out", lm.out, "Output LM JSON")->required();
  l->callback([&] { run = [&] { return RunLm(lm); }; });

  TrainArgs tr;
  auto *t = app.add_subcommand("train", "Train an acoustic model");
  t->add_option("--corpus", tr.corpus, "Training corpus")->required();
  t->add_option("--model", tr.model, "Network config JSON (default: desk preset)");
  t->add_option("--config", tr.config, "Training config JSON");
  t->add_option("--seed", tr.seed, "Override the training seed");
  t->add_option("--epochs", tr.epochs, "Override the epoch count")->check(CLI::NonNegativeNumber);
  t->add_option("--out", tr.out, "Output checkpoint")->required();
  t->add_option("--history", tr.history, "Per-epoch history (JSON lines)");
  t->callback([&] { run = [&] { return RunTrain(tr); }; });

  EvalArgs ev;
  auto *e = app.add_subcommand("eval", "Frame and phone error of a checkpoint");
  e->add_option("--checkpoint", ev.checkpoint, "Checkpoint")->required();
  e->add_option("--corpus", ev.corpus, "Evaluation corpus")->required();
  e->add_option("--out", ev.out, "Metrics JSON (stdout if omitted)");
  e->callback([&] { run = [&] { return RunEval(ev); }; });

  DecodeArgs de;
  auto *d = app.add_subcommand("decode", "Viterbi / n-best decoding to JSON");
  d->add_option("--checkpoint", de.checkpoint, "Checkpoint")->required();
  d->add_option("--corpus", de.corpus, "Corpus to decode")->required();
  d->add_option("--nbest", de.nbest, "Hypotheses per utterance")->check(CLI::PositiveNumber);
  d->add_option("--beam", de.beam, "Partial paths kept per frame")->check(CLI::PositiveNumber);
  d->add_option("--out", de.out, "Output JSON (stdout if omitted)");
  d->callback([&] { run = [&] { return RunDecode(de); }; });

  RescoreArgs rs;
  auto *r = app.add_subcommand("rescore", "Rescore n-best lists with an LM over an LMWT grid");
  r->add_option("--nbest", rs.nbest, "n-best JSON from decode")->required();
  r->add_option("--lm", rs.lm, "LM JSON from `lm`, or 'oracle'")->required();
  r->add_option("--lmwt", rs.lmwt, "LM weight(s); default grid 0.2..2.0");
  r->add_option("--out", rs.out, "Output JSON (stdout if omitted)");
  r->callback([&] { run = [&] { return RunRescore(rs); }; });

  InspectArgs in;
  auto *i = app.add_subcommand("inspect", "Dump configs, checkpoints or graphs");
  auto *i_ckpt = i->add_option("--checkpoint", in.checkpoint, "Checkpoint to summarize");
  auto *i_cfg = i->add_option("--config", in.config, "Network config JSON to expand");
  auto *i_graph = i->add_option("--graph", in.graph, "num or den")->check(CLI::IsMember({"num", "den"}));
  i_ckpt->excludes(i_cfg)->excludes(i_graph);
  i_cfg->excludes(i_graph);
  i->add_option("--phones", in.phones, "Comma-separated phones (num graph)");
  i->add_option("--frames", in.frames, "Unroll to this many frames (0: compact)")
      ->check(CLI::NonNegativeNumber);
  i->add_option("--num-phones", in.num_phones, "Phone inventory size")->check(CLI::PositiveNumber);
  i->add_option("--lm", in.lm, "n-gram LM JSON (required for den)");
  i->callback([&] { run = [&] { return RunInspect(in); }; });

  CurvesArgs cu;
  auto *c = app.add_subcommand("curves", "Learning-curve and LMWT-sweep CSV");
  auto *c_hist = c->add_option("--history", cu.history, "History JSON lines from train");
  auto *c_sweep = c->add_option("--sweep", cu.sweep, "Rescore output JSON");
  c_hist->excludes(c_sweep);
  c->add_option("--out", cu.out, "Output CSV (stdout if omitted)");
  c->callback([&] { run = [&] { return RunCurves(cu); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kUsageExit;
  }
  try {
    return run ? run() : kUsageExit;
  } catch (const pfsmn::Error &err) {
    const std::string_view kind = pfsmn::ErrorKindName(err.kind());
    std::fprintf(stderr, "error: %.*s: %s\n", static_cast<int>(kind.size()), kind.data(),
                 OneLine(err.what()).c_str());
    return kFailureExit;
  } catch (const std::exception &err) {
    std::fprintf(stderr, "error: internal: %s\n", OneLine(err.what()).c_str());
    return kFailureExit;
  }
}
