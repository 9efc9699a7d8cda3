// pfsmn/error.h

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

#ifndef PFSMN_ERROR_H_
#define PFSMN_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace pfsmn {

enum class ErrorKind {
  kConfig,               // shapes or hyperparameters do not conform
  kInfeasible,           // a graph admits no complete path of the requested length
  kNumeratorInfeasible,  // the utterance should be skipped by the trainer
  kEmptyGraph,           // trimming removed every state
  kLimitExceeded,        // an exhaustive oracle would exceed its path budget
  kNumeric,              // non-finite values appeared
  kFormat,               // a file or stream is malformed
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string &message);

}  // namespace pfsmn

#endif  // PFSMN_ERROR_H_
