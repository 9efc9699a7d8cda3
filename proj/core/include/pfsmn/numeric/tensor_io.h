// pfsmn/numeric/tensor_io.h

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

#ifndef PFSMN_NUMERIC_TENSOR_IO_H_
#define PFSMN_NUMERIC_TENSOR_IO_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "pfsmn/numeric/tensor.h"

namespace pfsmn {

// Binary layout: the magic bytes "PFT1", u32 rank, rank x u64 extents, then
// little-endian IEEE-754 doubles in row-major order.  Gradients are not stored.
void WriteTensor(std::ostream &os, const Tensor &t);
Tensor ReadTensor(std::istream &is);

void WriteTensorFile(const std::string &path, const Tensor &t);
Tensor ReadTensorFile(const std::string &path);

// Little-endian primitives shared by the container formats built on top.
void WriteU32(std::ostream &os, std::uint32_t v);
void WriteU64(std::ostream &os, std::uint64_t v);
std::uint32_t ReadU32(std::istream &is);
std::uint64_t ReadU64(std::istream &is);
void WriteBytes(std::ostream &os, const std::string &bytes);
std::string ReadBytes(std::istream &is, std::size_t n);

}  // namespace pfsmn

#endif  // PFSMN_NUMERIC_TENSOR_IO_H_
