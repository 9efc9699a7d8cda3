// net_config.cc

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

#include "pfsmn/net/config.h"

#include <algorithm>

#include "pfsmn/error.h"

namespace pfsmn {

namespace {

void Require(bool ok, const std::string &message) {
  if (!ok) Fail(ErrorKind::kConfig, message);
}

bool SameOrders(const MemoryBlockSpec &a, const MemoryBlockSpec &b) {
  return a.past_order == b.past_order && a.future_order == b.future_order;
}

std::string BlockName(std::size_t l) { return "block" + std::to_string(l); }

}  // namespace

FrontEndConfig MakeFrontEnd(std::span<const int> channels) {
  Require(channels.size() == kFrontEndLayers, "front-end needs 6 channel widths");
  FrontEndConfig fe;
  for (int i = 0; i < kFrontEndLayers; ++i) {
    ConvLayerSpec layer;
    layer.kernel = i < 3 ? 5 : 3;
    layer.channels = channels[static_cast<std::size_t>(i)];
    layer.subsample = (i % 2) == 1;
    fe.layers.push_back(layer);
  }
  return fe;
}

void AssignSkipJunctions(std::vector<BlockConfig> &blocks, Architecture arch) {
  if (blocks.empty()) return;
  blocks[0].mem.skip_depth = 0;
  std::size_t run_start = 0;       // first block of the current equal-order run
  std::size_t prev_run_start = 0;  // first block of the run before it
  for (std::size_t l = 1; l < blocks.size(); ++l) {
    if (arch == Architecture::kDfsmn) {
      blocks[l].mem.skip_depth = 1;
      continue;
    }
    if (SameOrders(blocks[l].mem, blocks[l - 1].mem)) {
      blocks[l].mem.skip_depth = 0;
    } else {
      prev_run_start = run_start;
      run_start = l;
      blocks[l].mem.skip_depth = static_cast<int>(l - prev_run_start);
    }
  }
}

std::vector<BlockConfig> MakeBlocks(std::span<const int> past_orders,
                                    std::span<const int> strides, int hidden_dim,
                                    int bottleneck_dim, Architecture arch) {
  Require(past_orders.size() == strides.size(),
          "order and stride schedules differ in length");
  std::vector<BlockConfig> blocks(past_orders.size());
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    auto &mem = blocks[l].mem;
    mem.past_order = past_orders[l];
    mem.future_order = past_orders[l] / 2;
    mem.past_stride = strides[l];
    mem.future_stride = strides[l];
    mem.hidden_dim = hidden_dim;
    blocks[l].proj_dim = bottleneck_dim;
    blocks[l].relu_dim = bottleneck_dim;
  }
  AssignSkipJunctions(blocks, arch);
  return blocks;
}

NetworkConfig PaperPreset(int input_dim, int output_dim) {
  static constexpr int kOrders[] = {4, 4, 8, 8, 12, 12, 16, 16, 20, 20};
  static constexpr int kStrides[] = {1, 1, 1, 1, 1, 2, 2, 2, 2, 2};
  static constexpr int kChannels[] = {32, 32, 64, 64, 128, 128};
  NetworkConfig cfg;
  cfg.input_dim = input_dim;
  cfg.output_dim = output_dim;
  cfg.front_end = MakeFrontEnd(kChannels);
  cfg.blocks = MakeBlocks(kOrders, kStrides, 1536, 256, Architecture::kPyramidal);
  cfg.l2_coefficient = 5e-5;
  cfg.preset = "paper";
  return cfg;
}

NetworkConfig DeskPreset(int input_dim, int output_dim) {
  static constexpr int kOrders[] = {2, 2, 4, 4, 6, 6};
  static constexpr int kStrides[] = {1, 1, 1, 2, 2, 2};
  static constexpr int kChannels[] = {8, 8, 16, 16, 32, 32};
  NetworkConfig cfg;
  cfg.input_dim = input_dim;
  cfg.output_dim = output_dim;
  cfg.front_end = MakeFrontEnd(kChannels);
  cfg.blocks = MakeBlocks(kOrders, kStrides, 96, 32, Architecture::kPyramidal);
  cfg.l2_coefficient = 1e-5;
  cfg.preset = "desk";
  return cfg;
}

std::vector<ShortcutSpan> ShortcutSpans(const FrontEndConfig &fe) {
  std::vector<ShortcutSpan> spans;
  for (std::size_t i = 0; i + 1 < fe.layers.size(); ++i) {
    if (fe.layers[i].kernel == fe.layers[i + 1].kernel) continue;
    const int in_channels = i == 0 ? 1 : fe.layers[i - 1].channels;
    const bool strided = fe.layers[i].subsample || fe.layers[i + 1].subsample;
    spans.push_back({static_cast<int>(i), static_cast<int>(i + 1),
                     strided || in_channels != fe.layers[i + 1].channels});
  }
  return spans;
}

int MinFeatureDim(const FrontEndConfig &fe) {
  int min_dim = 1;
  for (const auto &layer : fe.layers) {
    if (layer.subsample) min_dim *= 2;
  }
  return min_dim;
}

int FrontEndOutputDim(const NetworkConfig &cfg) {
  if (!cfg.front_end.enabled()) return cfg.input_dim;
  int width = cfg.input_dim;
  for (const auto &layer : cfg.front_end.layers) {
    if (layer.subsample) width = (width + 1) / 2;
  }
  return width * cfg.front_end.layers.back().channels;
}

int BlockInputDim(const NetworkConfig &cfg, std::size_t block) {
  return block == 0 ? FrontEndOutputDim(cfg) : cfg.blocks[block - 1].mem.hidden_dim;
}

int HeadInputDim(const NetworkConfig &cfg) {
  return cfg.blocks.empty() ? FrontEndOutputDim(cfg) : cfg.blocks.back().mem.hidden_dim;
}

int CountSkipJunctions(const NetworkConfig &cfg) {
  return static_cast<int>(std::count_if(
      cfg.blocks.begin(), cfg.blocks.end(),
      [](const BlockConfig &b) { return b.mem.skip_depth > 0; }));
}

void Validate(const NetworkConfig &cfg) {
  Require(cfg.input_dim > 0, "input_dim must be positive");
  Require(cfg.output_dim > 0, "output_dim must be positive");
  Require(cfg.l2_coefficient >= 0.0, "l2_coefficient must be non-negative");

  const auto &fe = cfg.front_end;
  if (fe.enabled()) {
    Require(fe.layers.size() == kFrontEndLayers, "front-end must have exactly 6 layers");
    for (std::size_t i = 0; i < fe.layers.size(); ++i) {
      const auto &layer = fe.layers[i];
      const std::string where = "front-end layer " + std::to_string(i + 1);
      Require(layer.kernel == 3 || layer.kernel == 5, where + ": kernel must be 3 or 5");
      Require(layer.channels > 0, where + ": channels must be positive");
      Require(layer.subsample == (i % 2 == 1),
              where + ": subsampling must be on layers 2, 4 and 6 only");
    }
    const auto spans = ShortcutSpans(fe);
    for (std::size_t s = 1; s < spans.size(); ++s) {
      Require(spans[s].first > spans[s - 1].second,
              "front-end kernel-size transitions must not be adjacent");
    }
    const int min_dim = MinFeatureDim(fe);
    Require(cfg.input_dim >= min_dim,
            "feature dim F=" + std::to_string(cfg.input_dim) +
                " is too small for the front-end; minimal F is " + std::to_string(min_dim));
  }

  for (std::size_t l = 0; l < cfg.blocks.size(); ++l) {
    const auto &block = cfg.blocks[l];
    const auto &mem = block.mem;
    const std::string where = BlockName(l);
    Require(mem.past_order >= 0 && mem.future_order >= 0, where + ": orders must be >= 0");
    Require(mem.past_stride >= 1 && mem.future_stride >= 1, where + ": strides must be >= 1");
    Require(mem.hidden_dim > 0, where + ": hidden_dim must be positive");
    Require(block.relu_dim > 0 && block.proj_dim > 0, where + ": bottleneck must be positive");
    Require(block.proj_dim == block.relu_dim, where + ": proj_dim must equal relu_dim");
    Require(mem.skip_depth >= 0 && static_cast<std::size_t>(mem.skip_depth) <= l,
            where + ": skip_depth exceeds the block index");
    if (mem.skip_depth > 0) {
      const auto &source = cfg.blocks[l - static_cast<std::size_t>(mem.skip_depth)];
      Require(source.mem.hidden_dim == mem.hidden_dim,
              where + ": skip source has a different hidden_dim");
    }
  }

  if (cfg.architecture == Architecture::kPyramidal &&
      (cfg.preset == "paper" || cfg.preset == "desk")) {
    for (std::size_t l = 1; l < cfg.blocks.size(); ++l) {
      Require(cfg.blocks[l].mem.past_order >= cfg.blocks[l - 1].mem.past_order &&
                  cfg.blocks[l].mem.future_order >= cfg.blocks[l - 1].mem.future_order,
              "pyramidal presets need non-decreasing orders with depth");
    }
  }
}

ReceptiveField ComputeReceptiveField(const NetworkConfig &cfg,
                                     std::optional<std::size_t> num_blocks) {
  ReceptiveField rf;
  for (const auto &layer : cfg.front_end.layers) {
    rf.past += (layer.kernel - 1) / 2;
    rf.future += (layer.kernel - 1) / 2;
  }
  const std::size_t n = std::min(num_blocks.value_or(cfg.blocks.size()), cfg.blocks.size());
  for (std::size_t l = 0; l < n; ++l) {
    const auto &mem = cfg.blocks[l].mem;
    rf.past += mem.past_order * mem.past_stride;
    rf.future += mem.future_order * mem.future_stride;
  }
  return rf;
}

std::vector<ParamEntry> ParamLayout(const NetworkConfig &cfg) {
  std::vector<ParamEntry> layout;
  auto extent = [](int v) { return static_cast<std::size_t>(v); };
  const auto &fe = cfg.front_end;
  int in_channels = 1;
  for (std::size_t i = 0; i < fe.layers.size(); ++i) {
    const auto &layer = fe.layers[i];
    const std::string prefix = "frontend.conv" + std::to_string(i + 1);
    layout.push_back({prefix + ".kernel", {extent(layer.channels), extent(in_channels),
                                           extent(layer.kernel), extent(layer.kernel)}});
    layout.push_back({prefix + ".bias", {extent(layer.channels)}});
    in_channels = layer.channels;
  }
  for (const auto &span : ShortcutSpans(fe)) {
    if (!span.needs_projection) continue;
    const int from = span.first == 0 ? 1 : fe.layers[span.first - 1].channels;
    const int to = fe.layers[span.second].channels;
    layout.push_back({"frontend.shortcut" + std::to_string(span.first + 1) + ".proj",
                      {extent(to), extent(from), 1, 1}});
  }
  for (std::size_t l = 0; l < cfg.blocks.size(); ++l) {
    const auto &block = cfg.blocks[l];
    const std::string prefix = BlockName(l);
    layout.push_back({prefix + ".affine.weight",
                      {extent(BlockInputDim(cfg, l)), extent(block.relu_dim)}});
    layout.push_back({prefix + ".affine.bias", {extent(block.relu_dim)}});
    layout.push_back({prefix + ".linear.weight",
                      {extent(block.proj_dim), extent(block.mem.hidden_dim)}});
    layout.push_back({prefix + ".memory.past",
                      {extent(block.mem.past_order + 1), extent(block.mem.hidden_dim)}});
    layout.push_back({prefix + ".memory.future",
                      {extent(block.mem.future_order + 1), extent(block.mem.hidden_dim)}});
  }
  const std::size_t head_in = extent(HeadInputDim(cfg));
  layout.push_back({"chain.weight", {head_in, extent(cfg.output_dim)}});
  layout.push_back({"chain.bias", {extent(cfg.output_dim)}});
  layout.push_back({"xent.weight", {head_in, extent(cfg.output_dim)}});
  layout.push_back({"xent.bias", {extent(cfg.output_dim)}});
  return layout;
}

std::size_t ParamCount(const NetworkConfig &cfg) {
  std::size_t total = 0;
  for (const auto &entry : ParamLayout(cfg)) total += NumElements(entry.shape);
  return total;
}

nlohmann::json ToJson(const NetworkConfig &cfg) {
  nlohmann::json j;
  j["input_dim"] = cfg.input_dim;
  j["output_dim"] = cfg.output_dim;
  j["l2_coefficient"] = cfg.l2_coefficient;
  j["preset"] = cfg.preset;
  j["architecture"] = cfg.architecture == Architecture::kPyramidal ? "pyramidal" : "dfsmn";
  auto &layers = j["front_end"] = nlohmann::json::array();
  for (const auto &layer : cfg.front_end.layers) {
    layers.push_back({{"kernel", layer.kernel},
                      {"channels", layer.channels},
                      {"subsample", layer.subsample}});
  }
  auto &blocks = j["blocks"] = nlohmann::json::array();
  for (const auto &block : cfg.blocks) {
    blocks.push_back({{"past_order", block.mem.past_order},
                      {"future_order", block.mem.future_order},
                      {"past_stride", block.mem.past_stride},
                      {"future_stride", block.mem.future_stride},
                      {"hidden_dim", block.mem.hidden_dim},
                      {"skip_depth", block.mem.skip_depth},
                      {"proj_dim", block.proj_dim},
                      {"relu_dim", block.relu_dim}});
  }
  return j;
}

NetworkConfig NetworkConfigFromJson(const nlohmann::json &j) {
  try {
    // A bare {"preset": ..., "input_dim": ..., "output_dim": ...} expands to the
    // named preset; explicit fields then override it.
    NetworkConfig cfg;
    const std::string preset = j.value("preset", std::string("custom"));
    const int input_dim = j.at("input_dim").get<int>();
    const int output_dim = j.at("output_dim").get<int>();
    if (preset == "paper") {
      cfg = PaperPreset(input_dim, output_dim);
    } else if (preset == "desk") {
      cfg = DeskPreset(input_dim, output_dim);
    } else {
      cfg.input_dim = input_dim;
      cfg.output_dim = output_dim;
      cfg.preset = preset;
    }
    if (j.contains("l2_coefficient")) cfg.l2_coefficient = j["l2_coefficient"].get<double>();
    if (j.contains("architecture")) {
      const std::string arch = j["architecture"].get<std::string>();
      if (arch == "pyramidal") {
        cfg.architecture = Architecture::kPyramidal;
      } else if (arch == "dfsmn") {
        cfg.architecture = Architecture::kDfsmn;
      } else {
        Fail(ErrorKind::kConfig, "unknown architecture '" + arch + "'");
      }
    }
    if (j.contains("front_end")) {
      cfg.front_end.layers.clear();
      for (const auto &layer : j["front_end"]) {
        cfg.front_end.layers.push_back({layer.at("kernel").get<int>(),
                                        layer.at("channels").get<int>(),
                                        layer.at("subsample").get<bool>()});
      }
    }
    if (j.contains("blocks")) {
      cfg.blocks.clear();
      bool explicit_skips = true;
      for (const auto &b : j["blocks"]) {
        BlockConfig block;
        block.mem.past_order = b.at("past_order").get<int>();
        block.mem.future_order = b.value("future_order", block.mem.past_order / 2);
        block.mem.past_stride = b.value("past_stride", 1);
        block.mem.future_stride = b.value("future_stride", block.mem.past_stride);
        block.mem.hidden_dim = b.at("hidden_dim").get<int>();
        block.relu_dim = b.at("relu_dim").get<int>();
        block.proj_dim = b.value("proj_dim", block.relu_dim);
        if (b.contains("skip_depth")) {
          block.mem.skip_depth = b["skip_depth"].get<int>();
        } else {
          explicit_skips = false;
        }
        cfg.blocks.push_back(block);
      }
      if (!explicit_skips) AssignSkipJunctions(cfg.blocks, cfg.architecture);
    } else if (j.contains("architecture")) {
      AssignSkipJunctions(cfg.blocks, cfg.architecture);
    }
    return cfg;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kConfig, std::string("network config: ") + e.what());
  }
}

std::uint64_t ConfigHash(const NetworkConfig &cfg) {
  const std::string text = ToJson(cfg).dump();
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

}  // namespace pfsmn
