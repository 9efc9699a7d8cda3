// pfsmn/net/config.h

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

#ifndef PFSMN_NET_CONFIG_H_
#define PFSMN_NET_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfsmn/numeric/tensor.h"

namespace pfsmn {

enum class Architecture {
  kPyramidal,  // skip input only where the memory order changes
  kDfsmn,      // baseline: skip from the previous block plus a standalone h_t
};

/// Memory-block geometry.  The tap coefficients live in the network's
/// parameter set with (past_order + 1) and (future_order + 1) rows.
struct MemoryBlockSpec {
  int past_order = 0;
  int future_order = 0;
  int past_stride = 1;
  int future_stride = 1;
  int hidden_dim = 0;
  // Block l adds the output of block l - skip_depth; 0 means no skip input.
  int skip_depth = 0;
};

struct BlockConfig {
  MemoryBlockSpec mem;
  int proj_dim = 0;
  int relu_dim = 0;
};

struct ConvLayerSpec {
  int kernel = 3;    // square, 3 or 5
  int channels = 8;
  bool subsample = false;  // stride 2 along frequency
};

struct FrontEndConfig {
  // Empty means no convolutional front-end: features feed block 0 directly.
  std::vector<ConvLayerSpec> layers;
  bool enabled() const { return !layers.empty(); }
};

struct NetworkConfig {
  int input_dim = 0;
  FrontEndConfig front_end;
  std::vector<BlockConfig> blocks;
  int output_dim = 0;
  double l2_coefficient = 0.0;
  std::string preset = "custom";
  Architecture architecture = Architecture::kPyramidal;
};

inline constexpr int kFrontEndLayers = 6;

// Kernel schedule 5,5,5,3,3,3 with subsampling on layers 2, 4 and 6.
FrontEndConfig MakeFrontEnd(std::span<const int> channels);

// Blocks with future order = past order / 2, future stride = past stride, and
// skip junctions assigned for `arch`.
std::vector<BlockConfig> MakeBlocks(std::span<const int> past_orders,
                                    std::span<const int> strides, int hidden_dim,
                                    int bottleneck_dim, Architecture arch);

// Pyramidal: a block whose (past, future) orders differ from its predecessor
// receives the output of the first block of the preceding equal-order run.
// DFSMN: every block after the first receives its predecessor's output.
void AssignSkipJunctions(std::vector<BlockConfig> &blocks, Architecture arch);

NetworkConfig PaperPreset(int input_dim, int output_dim);
NetworkConfig DeskPreset(int input_dim, int output_dim);

// Throws Error(kConfig) naming the offending field.
void Validate(const NetworkConfig &cfg);

struct ShortcutSpan {
  int first;   // layer index where the residual input is taken
  int second;  // layer index whose pre-activation receives it
  bool needs_projection;
};
std::vector<ShortcutSpan> ShortcutSpans(const FrontEndConfig &fe);

// Smallest feature dimension the front-end accepts: 2^(subsampling layers).
int MinFeatureDim(const FrontEndConfig &fe);
int FrontEndOutputDim(const NetworkConfig &cfg);
int BlockInputDim(const NetworkConfig &cfg, std::size_t block);
int HeadInputDim(const NetworkConfig &cfg);
int CountSkipJunctions(const NetworkConfig &cfg);

struct ReceptiveField {
  int past = 0;
  int future = 0;
};
// Frames of input context visible to one output frame, optionally restricted
// to the front-end plus the first `num_blocks` blocks.
ReceptiveField ComputeReceptiveField(const NetworkConfig &cfg,
                                     std::optional<std::size_t> num_blocks = {});

struct ParamEntry {
  std::string name;
  Shape shape;
};
// Canonical ordered list of every parameter tensor.
std::vector<ParamEntry> ParamLayout(const NetworkConfig &cfg);
std::size_t ParamCount(const NetworkConfig &cfg);

nlohmann::json ToJson(const NetworkConfig &cfg);
NetworkConfig NetworkConfigFromJson(const nlohmann::json &j);
// FNV-1a over the canonical JSON dump.
std::uint64_t ConfigHash(const NetworkConfig &cfg);

}  // namespace pfsmn

#endif  // PFSMN_NET_CONFIG_H_
