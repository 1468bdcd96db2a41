#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wordfence/error.hpp"
#include "wordfence/io.hpp"
#include "wordfence/toynet.hpp"

// Parameter checkpoints. The tensor file holds twelve FTEN tensors back to
// back, one kernel (rank 4: ky, kx, in, out) and one bias (rank 1) per layer,
// ordered trunk 0..2 then heads 0..2. A JSON manifest with layer names,
// shapes, dilations and the training configuration is written alongside at
// <checkpoint>.json; the manifest is informational and not required to load.

namespace wf {

namespace detail {

inline std::vector<float> to_f32(const std::vector<double>& v) {
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
  return out;
}

inline void layer_names(std::vector<std::string>& names) {
  for (int i = 0; i < kTrunkDepth; ++i) names.push_back("trunk" + std::to_string(i));
  for (int i = 0; i < kNumHeads; ++i) names.push_back("head" + std::to_string(i));
}

}  // namespace detail

inline std::string checkpoint_manifest_path(const std::string& checkpoint_path) {
  return checkpoint_path + ".json";
}

inline void save_checkpoint(const std::string& path, const NetworkParams& params,
                            std::uint64_t seed = 0, const TrainConfig* config = nullptr) {
  params.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(path + ": cannot open for writing");
  nlohmann::json layers = nlohmann::json::array();
  std::vector<std::string> names;
  detail::layer_names(names);
  std::size_t idx = 0;
  auto dump = [&](const ConvLayer& l) {
    write_ften_stream(os,
                      {static_cast<std::uint32_t>(l.kernel), static_cast<std::uint32_t>(l.kernel),
                       static_cast<std::uint32_t>(l.in_channels),
                       static_cast<std::uint32_t>(l.out_channels)},
                      detail::to_f32(l.weights));
    write_ften_stream(os, {static_cast<std::uint32_t>(l.out_channels)}, detail::to_f32(l.bias));
    layers.push_back({{"name", names[idx++]},
                      {"kernel", l.kernel},
                      {"dilation", l.dilation},
                      {"in_channels", l.in_channels},
                      {"out_channels", l.out_channels}});
  };
  for (const ConvLayer& l : params.trunk) dump(l);
  for (const ConvLayer& l : params.heads) dump(l);
  if (!os) throw IoError(path + ": write failed");
  os.close();

  nlohmann::json manifest{{"format", "wordfence-checkpoint-v1"}, {"layers", layers}, {"seed", seed}};
  if (config) {
    manifest["config"] = {{"learning_rate", config->learning_rate},
                          {"epochs", config->epochs},
                          {"batch", config->batch},
                          {"seed", config->seed},
                          {"weight_init_scale", config->weight_init_scale}};
  }
  const std::string mpath = checkpoint_manifest_path(path);
  std::ofstream ms(mpath, std::ios::binary);
  if (!ms) throw IoError(mpath + ": cannot open for writing");
  ms << manifest.dump(2) << "\n";
  if (!ms) throw IoError(mpath + ": write failed");
}

inline NetworkParams load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path + ": cannot open");
  NetworkParams params = NetworkParams::architecture();
  auto load = [&](ConvLayer& l) {
    const FtenBlob wb = read_ften_stream(is, path);
    if (wb.dims.size() != 4 || wb.dims[0] != static_cast<std::uint32_t>(l.kernel) ||
        wb.dims[1] != static_cast<std::uint32_t>(l.kernel) ||
        wb.dims[2] != static_cast<std::uint32_t>(l.in_channels) ||
        wb.dims[3] != static_cast<std::uint32_t>(l.out_channels))
      throw IoError(path + ": kernel tensor shape does not match network architecture");
    const FtenBlob bb = read_ften_stream(is, path);
    if (bb.dims.size() != 1 || bb.dims[0] != static_cast<std::uint32_t>(l.out_channels))
      throw IoError(path + ": bias tensor shape does not match network architecture");
    for (std::size_t i = 0; i < l.weights.size(); ++i)
      l.weights[i] = static_cast<double>(wb.values[i]);
    for (std::size_t i = 0; i < l.bias.size(); ++i) l.bias[i] = static_cast<double>(bb.values[i]);
  };
  for (ConvLayer& l : params.trunk) load(l);
  for (ConvLayer& l : params.heads) load(l);
  return params;
}

}  // namespace wf
