#pragma once

#include <cstdint>

#include "mggo/guidance_graph.hpp"

namespace mggo {

/// Fully bidirected, all weights 1.
MixedGuidanceGraph make_unweighted(BaseGraphPtr base, WeightBounds bounds = {});

/// Largest admissible crisscross period: floor(min(H, W) / 2), at least 1.
int max_crisscross_period(const BaseGraph& base);

/// Directed crisscross highways alternating every `period` rows and columns.
///
/// Horizontal edges in row r point east when floor(r / period) is even and
/// west otherwise; vertical edges in column c point north when
/// floor(c / period) is even and south otherwise, so each period-sized block
/// circulates clockwise. Bridges stay bidirected and weights are 1. The result
/// may need repair on maps with obstacles.
MixedGuidanceGraph crisscross(BaseGraphPtr base, int period, WeightBounds bounds = {});

/// Robbins-style orientation from a randomized DFS: tree edges point away
/// from the root, back edges toward it, bridges stay bidirected. The seed
/// picks the root and the neighbour order. Always strongly connected.
MixedGuidanceGraph dfs_orientation(BaseGraphPtr base, std::uint64_t seed, WeightBounds bounds = {});

/// Each non-bridge edge Forward or Backward with probability 1/2.
MixedGuidanceGraph random_orientation(BaseGraphPtr base, std::uint64_t seed,
                                      WeightBounds bounds = {});

}  // namespace mggo
