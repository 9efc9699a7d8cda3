// chain_loss.cc

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

#include "pfsmn/loss/chain_loss.h"

#include <cmath>
#include <string>

#include "pfsmn/error.h"
#include "pfsmn/numeric/ops.h"

namespace pfsmn {

LossReport LfmmiLoss(const FrameGraph &num, const FrameGraph &den, const Tensor &loglik,
                     double scale) {
  ForwardBackwardResult n;
  try {
    n = ForwardBackward(num, loglik, scale);
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::kInfeasible) throw;
    Fail(ErrorKind::kNumeratorInfeasible, std::string("numerator: ") + e.what());
  }
  ForwardBackwardResult d = ForwardBackward(den, loglik, scale);

  LossReport report;
  report.num_logprob = n.total_logprob;
  report.den_logprob = d.total_logprob;
  report.value = n.total_logprob - d.total_logprob;
  report.grad = Tensor(loglik.shape());
  auto g = report.grad.values();
  const auto gn = n.occupancy.values();
  const auto gd = d.occupancy.values();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = scale * (gn[i] - gd[i]);
  return report;
}

LossReport CrossEntropyLoss(const Tensor &logits, std::span<const int> targets) {
  if (logits.rank() != 2 || logits.rows() != targets.size()) {
    Fail(ErrorKind::kConfig, "cross-entropy: logits " + ShapeToString(logits.shape()) +
                                 " vs " + std::to_string(targets.size()) + " targets");
  }
  const Tensor log_probs = LogSoftmax(logits);
  LossReport report;
  report.grad = Tensor(logits.shape());
  const std::size_t cols = logits.cols();
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    const int target = targets[t];
    if (target < 0 || static_cast<std::size_t>(target) >= cols) {
      Fail(ErrorKind::kConfig, "cross-entropy target " + std::to_string(target) +
                                   " out of range at frame " + std::to_string(t));
    }
    report.value -= log_probs.at(t, static_cast<std::size_t>(target));
    for (std::size_t p = 0; p < cols; ++p) report.grad.at(t, p) = std::exp(log_probs.at(t, p));
    report.grad.at(t, static_cast<std::size_t>(target)) -= 1.0;
  }
  return report;
}

JointLossReport JointLoss(const FrameGraph &num, const FrameGraph &den,
                          const Tensor &chain_output, const Tensor &xent_logits,
                          std::span<const int> targets, double scale, double alpha) {
  JointLossReport r;
  r.alpha = alpha;
  r.mmi = LfmmiLoss(num, den, chain_output, scale);
  r.xent = CrossEntropyLoss(xent_logits, targets);
  r.value = -r.mmi.value + alpha * r.xent.value;
  r.chain_grad = Tensor(chain_output.shape());
  for (std::size_t i = 0; i < r.chain_grad.size(); ++i) r.chain_grad[i] = -r.mmi.grad[i];
  r.xent_grad = Tensor(xent_logits.shape());
  for (std::size_t i = 0; i < r.xent_grad.size(); ++i) r.xent_grad[i] = alpha * r.xent.grad[i];
  return r;
}

double L2Penalty(std::span<Tensor *const> params, double coefficient) {
  if (coefficient == 0.0) return 0.0;
  double total = 0.0;
  for (Tensor *p : params) {
    auto g = p->grad();
    const auto v = p->values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      total += v[i] * v[i];
      g[i] += 2.0 * coefficient * v[i];
    }
  }
  return coefficient * total;
}

nlohmann::json ToJson(const LossReport &report, bool with_grad) {
  nlohmann::json j = {{"value", report.value},
                      {"num_logprob", report.num_logprob},
                      {"den_logprob", report.den_logprob}};
  if (with_grad && !report.grad.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t t = 0; t < report.grad.rows(); ++t) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t p = 0; p < report.grad.cols(); ++p) row.push_back(report.grad.at(t, p));
      rows.push_back(std::move(row));
    }
    j["grad"] = std::move(rows);
  }
  return j;
}

}  // namespace pfsmn
