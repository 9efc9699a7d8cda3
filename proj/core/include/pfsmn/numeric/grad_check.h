// pfsmn/numeric/grad_check.h

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

#ifndef PFSMN_NUMERIC_GRAD_CHECK_H_
#define PFSMN_NUMERIC_GRAD_CHECK_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "pfsmn/numeric/tensor.h"

namespace pfsmn {

struct GradCheckOptions {
  double eps = 1e-4;
  double tol = 1e-6;
  // Coordinates checked per tensor; 0 checks all of them.  Sampled coordinates
  // are drawn without replacement from Rng(seed).
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 0;
  // Fourth-order stencil (-f(+2e) + 8 f(+e) - 8 f(-e) + f(-2e)) / (12 e) instead
  // of the two-point one; for objectives whose curvature swamps small
  // gradient coordinates.
  bool five_point = false;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool pass = false;
  std::size_t checked = 0;
  std::size_t excluded = 0;  // coordinates within eps of a non-differentiable point
  std::string worst;         // "tensor#i[j]" of the worst coordinate
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::string failure;       // set when the objective produced a non-finite value
};

// rel_err = |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
double RelativeError(double analytic, double numeric);

// Compares the analytic gradients already stored in params[i]->grad() against
// central differences (f(p + eps) - f(p - eps)) / (2 eps).
//
// `objective` must recompute the scalar from the current parameter values.
// `kink_signature`, when given, fingerprints the active set of every
// piecewise-linear unit (e.g. the relu masks); a coordinate whose +eps or -eps
// evaluation changes the fingerprint sits within eps of a kink and is excluded.
GradCheckReport GradCheck(const std::function<double()> &objective,
                          std::span<Tensor *const> params,
                          const GradCheckOptions &opts,
                          const std::function<std::uint64_t()> &kink_signature = {});

}  // namespace pfsmn

#endif  // PFSMN_NUMERIC_GRAD_CHECK_H_
