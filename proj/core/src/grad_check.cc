// grad_check.cc

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

#include "pfsmn/numeric/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pfsmn/numeric/rng.h"

namespace pfsmn {

double RelativeError(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

GradCheckReport GradCheck(const std::function<double()> &objective,
                          std::span<Tensor *const> params,
                          const GradCheckOptions &opts,
                          const std::function<std::uint64_t()> &kink_signature) {
  GradCheckReport report;
  Rng rng(opts.seed);
  std::uint64_t base_signature = 0;
  if (kink_signature) {
    objective();
    base_signature = kink_signature();
  }

  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor &param = *params[p];
    const std::vector<double> analytic(param.grad().begin(), param.grad().end());

    std::vector<std::size_t> coords(param.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (opts.max_coords_per_tensor > 0 && coords.size() > opts.max_coords_per_tensor) {
      rng.Shuffle(coords);
      coords.resize(opts.max_coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }

    for (std::size_t i : coords) {
      const double saved = param[i];
      bool kink = false;
      bool finite = true;
      const auto eval_at = [&](double offset) {
        param[i] = saved + offset;
        const double f = objective();
        kink = kink || (kink_signature && kink_signature() != base_signature);
        finite = finite && std::isfinite(f);
        return f;
      };
      const double e = opts.eps;
      double numeric;
      if (opts.five_point) {
        const double f2p = eval_at(2.0 * e), f1p = eval_at(e);
        const double f1m = eval_at(-e), f2m = eval_at(-2.0 * e);
        numeric = (8.0 * (f1p - f1m) - (f2p - f2m)) / (12.0 * e);
      } else {
        const double fp = eval_at(e), fm = eval_at(-e);
        numeric = (fp - fm) / (2.0 * e);
      }
      param[i] = saved;

      if (!finite) {
        report.pass = false;
        report.failure = "objective is non-finite at tensor#" + std::to_string(p) +
                         "[" + std::to_string(i) + "]";
        return report;
      }
      if (kink) {
        ++report.excluded;
        continue;
      }
      const double err = RelativeError(analytic[i], numeric);
      ++report.checked;
      if (report.worst.empty() || err > report.max_rel_err) {
        report.max_rel_err = err;
        report.worst = "tensor#" + std::to_string(p) + "[" + std::to_string(i) + "]";
        report.worst_analytic = analytic[i];
        report.worst_numeric = numeric;
      }
    }
  }
  // Leave the objective's cached state at the unperturbed point.
  if (kink_signature) objective();
  report.pass = report.max_rel_err <= opts.tol;
  return report;
}

}  // namespace pfsmn
