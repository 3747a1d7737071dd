#pragma once

#include "mggo/guidance_graph.hpp"

namespace mggo {

enum class MutationOp : std::uint8_t { KEdges, KVertices, RandomCycle };

std::string_view to_string(MutationOp op);

/// P(k) = (1 - p)^(k - 1) p for k >= 1.
int sample_geometric_k(Rng& rng, double p = 0.5);

/// Reverses k distinct unidirectional edges, k geometric and capped at the
/// number available.
MixedGuidanceGraph mutate_k_edges(const MixedGuidanceGraph& g, Rng& rng);
/// Picks k distinct vertices that touch a unidirectional edge and reverses
/// every unidirectional edge incident to any of them, once each.
MixedGuidanceGraph mutate_k_vertices(const MixedGuidanceGraph& g, Rng& rng);
/// Follows unidirectional edges by randomized DFS from a random vertex until
/// a directed cycle closes, then reverses the cycle. Returns the input
/// unchanged if no such cycle is reachable.
MixedGuidanceGraph mutate_random_cycle(const MixedGuidanceGraph& g, Rng& rng);

MixedGuidanceGraph mutate(const MixedGuidanceGraph& g, MutationOp op, Rng& rng);

}  // namespace mggo
