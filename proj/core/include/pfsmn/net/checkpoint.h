// pfsmn/net/checkpoint.h

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

#ifndef PFSMN_NET_CHECKPOINT_H_
#define PFSMN_NET_CHECKPOINT_H_

#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "pfsmn/net/network.h"

namespace pfsmn {

// Container layout: "PFCK", u64 header length, JSON header
//   {"config": ..., "config_hash": "<16 hex digits>", "tensors": [names...],
//    "extras": {...}}
// followed by, for each named tensor, u32 name length, the name, and the
// tensor in PFT1 format.
struct LoadedCheckpoint {
  Network network;
  nlohmann::json extras;
};

void SaveCheckpoint(std::ostream &os, const Network &net,
                    const nlohmann::json &extras = nlohmann::json::object());
void SaveCheckpoint(const std::string &path, const Network &net,
                    const nlohmann::json &extras = nlohmann::json::object());

// Fails when the stored hash does not match the stored config, or when
// `expected` is given and its hash differs from the checkpoint's.
LoadedCheckpoint LoadCheckpoint(std::istream &is,
                                const std::optional<NetworkConfig> &expected = {});
LoadedCheckpoint LoadCheckpoint(const std::string &path,
                                const std::optional<NetworkConfig> &expected = {});

std::string HashToHex(std::uint64_t hash);

}  // namespace pfsmn

#endif  // PFSMN_NET_CHECKPOINT_H_
