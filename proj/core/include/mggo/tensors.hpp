#pragma once

#include <span>

#include "mggo/guidance_graph.hpp"

namespace mggo {

inline constexpr int kWeightChannels = 5;       // 4 outgoing moves + self-loop
inline constexpr int kSelfLoopChannel = 4;
inline constexpr int kDirIndependentChannels = 4;
inline constexpr int kDirDependentChannels = 6;  // {fwd, bwd, both} x {east, south}

/// [H, W, 5]: outgoing move weights (east, south, west, north), then the
/// self-loop cost. Nonexistent edges and obstacle cells hold 0.
struct WeightTensor {
  Tensor data;
};

/// [H, W, 4]: 1 where the outgoing move edge exists, else 0.
struct DirTensorIndependent {
  Tensor data;
};

/// [H, W, 6]: scores for the east pair (u->v, v->u, both) at channels 0-2
/// and the same for the south pair at channels 3-5, indexed by the west /
/// north endpoint u.
struct DirTensorDependent {
  Tensor data;
};

struct GraphTensors {
  WeightTensor weights;
  DirTensorIndependent dirs;
};

/// 1 where a weight channel could ever be live on this base (base edge or
/// passable cell), else 0. Shape [H, W, 5].
Tensor weight_validity_mask(const BaseGraph& base);

GraphTensors to_tensors(const MixedGuidanceGraph& g);

/// Inverse of to_tensors. Throws on tensors inconsistent with the base.
MixedGuidanceGraph from_tensors(BaseGraphPtr base, const WeightTensor& weights,
                                const DirTensorIndependent& dirs, WeightBounds bounds = {});

/// Maps values affinely so min -> lower and max -> upper, then clamps. A
/// constant input maps to the midpoint. Throws on non-finite input.
void min_max_normalize(std::span<double> values, WeightBounds bounds);

/// Argmax decoding of dependent direction scores (ties: lowest channel),
/// bridges forced to Both, live weights min-max normalized into bounds.
MixedGuidanceGraph decode_dependent(BaseGraphPtr base, const DirTensorDependent& dirs,
                                    const WeightTensor& weights, WeightBounds bounds = {});

/// Fully bidirected graph carrying min-max normalized weights.
MixedGuidanceGraph decode_bidirected(BaseGraphPtr base, const WeightTensor& weights,
                                     WeightBounds bounds = {});

}  // namespace mggo
