// checkpoint.cc

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

#include "pfsmn/net/checkpoint.h"

#include <cstring>
#include <fstream>

#include "pfsmn/error.h"
#include "pfsmn/numeric/tensor_io.h"

namespace pfsmn {

namespace {

constexpr char kCheckpointMagic[4] = {'P', 'F', 'C', 'K'};

}  // namespace

std::string HashToHex(std::uint64_t hash) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[hash & 0xF];
    hash >>= 4;
  }
  return out;
}

void SaveCheckpoint(std::ostream &os, const Network &net, const nlohmann::json &extras) {
  nlohmann::json header;
  header["config"] = ToJson(net.config());
  header["config_hash"] = HashToHex(ConfigHash(net.config()));
  header["tensors"] = net.param_names();
  header["extras"] = extras;
  const std::string text = header.dump();
  os.write(kCheckpointMagic, 4);
  WriteU64(os, text.size());
  WriteBytes(os, text);
  for (std::size_t p = 0; p < net.params().size(); ++p) {
    const std::string &name = net.param_names()[p];
    WriteU32(os, static_cast<std::uint32_t>(name.size()));
    WriteBytes(os, name);
    WriteTensor(os, net.params()[p]);
  }
  if (!os) Fail(ErrorKind::kIo, "failed writing checkpoint");
}

void SaveCheckpoint(const std::string &path, const Network &net,
                    const nlohmann::json &extras) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail(ErrorKind::kIo, "cannot open " + path + " for writing");
  SaveCheckpoint(os, net, extras);
}

LoadedCheckpoint LoadCheckpoint(std::istream &is,
                                const std::optional<NetworkConfig> &expected) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    Fail(ErrorKind::kFormat, "not a checkpoint (expected PFCK magic)");
  }
  const std::uint64_t header_len = ReadU64(is);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(ReadBytes(is, header_len));
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kFormat, std::string("checkpoint header: ") + e.what());
  }
  NetworkConfig cfg = NetworkConfigFromJson(header.at("config"));
  const std::string stored_hash = header.value("config_hash", std::string());
  if (HashToHex(ConfigHash(cfg)) != stored_hash) {
    Fail(ErrorKind::kFormat, "checkpoint config hash mismatch: header says " +
                                 stored_hash + ", config hashes to " +
                                 HashToHex(ConfigHash(cfg)));
  }
  if (expected.has_value() && ConfigHash(*expected) != ConfigHash(cfg)) {
    Fail(ErrorKind::kConfig, "checkpoint config hash " + stored_hash +
                                 " does not match the requested config " +
                                 HashToHex(ConfigHash(*expected)));
  }
  LoadedCheckpoint out{Network(cfg), header.value("extras", nlohmann::json::object())};
  const auto &names = out.network.param_names();
  if (header.at("tensors").size() != names.size()) {
    Fail(ErrorKind::kFormat, "checkpoint tensor count does not match its config");
  }
  for (std::size_t p = 0; p < names.size(); ++p) {
    const std::string name = ReadBytes(is, ReadU32(is));
    if (name != names[p]) {
      Fail(ErrorKind::kFormat, "checkpoint tensor '" + name + "' where '" + names[p] +
                                   "' was expected");
    }
    Tensor t = ReadTensor(is);
    if (t.shape() != out.network.params()[p].shape()) {
      Fail(ErrorKind::kFormat, "checkpoint tensor '" + name + "' has shape " +
                                   ShapeToString(t.shape()));
    }
    out.network.params()[p] = std::move(t);
  }
  return out;
}

LoadedCheckpoint LoadCheckpoint(const std::string &path,
                                const std::optional<NetworkConfig> &expected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorKind::kIo, "cannot open " + path);
  return LoadCheckpoint(is, expected);
}

}  // namespace pfsmn
