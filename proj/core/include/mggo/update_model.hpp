#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mggo/traffic.hpp"

namespace mggo {

inline constexpr int kJointOutputDepth = kWeightChannels + kDirDependentChannels;  // 11
inline constexpr int kWeightOnlyOutputDepth = kWeightChannels;                       // 5

/// Three same-padded convolutions (3x3, 1x1, 1x1). The first two map to
/// `hidden` channels, the last to `output_depth`. Every convolution has a
/// bias and is followed by ReLU and a per-sample spatial normalization with
/// a learned per-channel scale and shift.
///
/// Flat parameter order, layer by layer: weights [out][in][kh][kw], biases
/// [out], norm scales [out], norm shifts [out].
struct ModelTopology {
  int input_depth = 46;
  int hidden = 8;
  int output_depth = kJointOutputDepth;

  static ModelTopology for_observations(int num_observations, int output_depth);

  int param_count() const;
  void validate() const;
  nlohmann::json to_json() const;
  static ModelTopology from_json(const nlohmann::json& j);
  bool operator==(const ModelTopology&) const = default;
};

inline constexpr double kNormEpsilon = 1e-5;

/// Pure forward pass. Throws on shape mismatch or non-finite parameters or
/// input.
Tensor forward(const ModelTopology& topology, std::span<const double> params, const Tensor& input);

/// Unweighted-graph traffic, crisscross traffic, then the unweighted graph's
/// weight and direction channels, then the crisscross graph's.
Tensor assemble_input(const TrafficPatterns& patterns);

/// Human-readable name of every channel produced by assemble_input.
std::vector<std::string> input_channel_names(int num_observations);

/// 11 channels: weights then dependent directions. 5 channels: weights only,
/// fully bidirected.
MixedGuidanceGraph decode_output(const BaseGraphPtr& base, const Tensor& output, WeightBounds bounds = {});

/// Raw little-endian doubles; the topology travels separately as JSON.
void save_params(const std::filesystem::path& path, std::span<const double> params);
std::vector<double> load_params(const std::filesystem::path& path, const ModelTopology& topology);

}  // namespace mggo
