// pfsmn/numeric/rng.h

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

#ifndef PFSMN_NUMERIC_RNG_H_
#define PFSMN_NUMERIC_RNG_H_

#include <cstdint>
#include <vector>

namespace pfsmn {

/// Portable pseudo-random generator: xorshift64* seeded through splitmix64.
///
///   seeding:  z = seed + 0x9E3779B97F4A7C15
///             z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///             state = z ^ (z >> 31)      (replaced by 1 if it is 0)
///   step:     x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27
///             return x * 0x2545F4914F6CDD1D
///
/// Every derived quantity (uniform doubles, bounded integers) is computed from
/// this 64-bit stream with integer arithmetic, so the same seed gives the same
/// stream on every platform.  Normal() goes through libm (log, cos, sqrt).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t NextU64();
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n); unbiased (rejection sampling).
  std::uint64_t UniformInt(std::uint64_t n);
  // Uniform integer in [lo, hi], inclusive.
  int UniformRange(int lo, int hi);
  // Standard normal via the Box-Muller transform; the second variate is cached.
  double Normal();
  // Derive an independent generator (e.g. one per utterance).
  Rng Fork();

  template <typename T>
  void Shuffle(std::vector<T> &items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(UniformInt(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pfsmn

#endif  // PFSMN_NUMERIC_RNG_H_
