#pragma once

#include <cstdint>

#include "mggo/guidance_graph.hpp"

namespace mggo {

struct ErsResult {
  MixedGuidanceGraph graph;
  /// Total single-edge reversals performed (an edge reversed twice counts twice).
  int reversed_count = 0;
  int iterations = 0;
  /// Bridges that had to be made bidirected before the search.
  int bridges_added = 0;
  /// Largest per-iteration work (SCC + condensation + cut scan).
  long long max_iteration_work = 0;
  /// Smallest |E_out| seen at a source component; -1 if no iteration ran.
  int min_out_edges = -1;
};

/// Edge Reversal Search: greedy strong-connectivity repair.
///
/// Bridges are made bidirected first. While more than one SCC remains, the
/// source component of the condensation containing the smallest vertex id is
/// chosen, the directed edges leaving it are collected, and half of them
/// (rounded down, sampled without replacement from `seed`) are reversed with
/// their weights. Throws Error(Limit) after 10 * |E| iterations.
ErsResult ers_repair(MixedGuidanceGraph g, std::uint64_t seed);

/// Minimum number of unidirectional non-bridge edges whose reversal makes
/// the graph strongly connected (bridges are bidirected first, for free).
/// Exhaustive over subsets in increasing size; throws Error(Limit) when more
/// than `max_orientable` edges are unidirectional.
int min_reversal_oracle(const MixedGuidanceGraph& g, int max_orientable = 16);

}  // namespace mggo
