// pfsmn/train/grad_suite.h

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

#ifndef PFSMN_TRAIN_GRAD_SUITE_H_
#define PFSMN_TRAIN_GRAD_SUITE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace pfsmn {

struct GradSuiteEntry {
  std::string name;
  double tol = 0.0;
  double max_rel_err = 0.0;
  std::size_t checked = 0;
  std::size_t excluded = 0;
  int seeds = 0;
  bool pass = true;
  std::string failure;  // first failure message, if any
};

inline constexpr double kGradTol = 1e-5;
inline constexpr double kElementwiseGradTol = 1e-6;

// Central-difference checks of every layer (affine, relu, conv2d, memory
// block, full network) and every loss (CE, LF-MMI, joint, L2) on random
// instances drawn from seeds first_seed .. first_seed + num_seeds - 1.
// One entry per check, aggregated over seeds.
std::vector<GradSuiteEntry> RunGradSuite(std::uint64_t first_seed, int num_seeds);

}  // namespace pfsmn

#endif  // PFSMN_TRAIN_GRAD_SUITE_H_
