// tensor_io.cc

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

#include "pfsmn/numeric/tensor_io.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "pfsmn/error.h"

namespace pfsmn {

namespace {

constexpr char kTensorMagic[4] = {'P', 'F', 'T', '1'};
constexpr std::uint32_t kMaxRank = 16;

void CheckStream(std::istream &is, const char *what) {
  if (!is) Fail(ErrorKind::kFormat, std::string("truncated stream while reading ") + what);
}

}  // namespace

void WriteU32(std::ostream &os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char *>(b), 4);
}

void WriteU64(std::ostream &os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char *>(b), 8);
}

std::uint32_t ReadU32(std::istream &is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char *>(b), 4);
  CheckStream(is, "u32");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t ReadU64(std::istream &is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char *>(b), 8);
  CheckStream(is, "u64");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void WriteBytes(std::ostream &os, const std::string &bytes) {
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string ReadBytes(std::istream &is, std::size_t n) {
  std::string out(n, '\0');
  is.read(out.data(), static_cast<std::streamsize>(n));
  CheckStream(is, "bytes");
  return out;
}

void WriteTensor(std::ostream &os, const Tensor &t) {
  os.write(kTensorMagic, 4);
  WriteU32(os, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t extent : t.shape()) WriteU64(os, extent);
  for (double v : t.values()) WriteU64(os, std::bit_cast<std::uint64_t>(v));
  if (!os) Fail(ErrorKind::kIo, "failed writing tensor");
}

Tensor ReadTensor(std::istream &is) {
  char magic[4];
  is.read(magic, 4);
  CheckStream(is, "tensor magic");
  if (std::memcmp(magic, kTensorMagic, 4) != 0) {
    Fail(ErrorKind::kFormat, "bad tensor magic (expected PFT1)");
  }
  const std::uint32_t rank = ReadU32(is);
  if (rank == 0 || rank > kMaxRank) {
    Fail(ErrorKind::kFormat, "unsupported tensor rank " + std::to_string(rank));
  }
  Shape shape(rank);
  for (auto &extent : shape) {
    extent = ReadU64(is);
    if (extent == 0) Fail(ErrorKind::kFormat, "tensor extent of zero");
  }
  std::vector<double> values(NumElements(shape));
  for (double &v : values) v = std::bit_cast<double>(ReadU64(is));
  return Tensor(std::move(shape), std::move(values));
}

void WriteTensorFile(const std::string &path, const Tensor &t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail(ErrorKind::kIo, "cannot open " + path + " for writing");
  WriteTensor(os, t);
}

Tensor ReadTensorFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorKind::kIo, "cannot open " + path);
  return ReadTensor(is);
}

}  // namespace pfsmn
