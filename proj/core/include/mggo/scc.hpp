#pragma once

#include <vector>

#include "mggo/guidance_graph.hpp"

namespace mggo {

/// Strongly connected components of the move edges of a guidance graph.
struct SccResult {
  /// Component id per cell; -1 for obstacle cells.
  std::vector<int> component;
  int count = 0;
  /// Vertices + edges touched, for linear-time checks.
  long long work = 0;
};

/// Iterative Tarjan; no recursion-depth limit.
SccResult tarjan_scc(const MixedGuidanceGraph& g);

bool is_strongly_connected(const MixedGuidanceGraph& g);

struct CondensationGraph {
  int num_meta_vertices = 0;
  /// Deduplicated meta edges, sorted.
  std::vector<std::pair<int, int>> meta_edges;
  std::vector<int> in_degree;
  std::vector<int> out_degree;
  long long work = 0;
};

CondensationGraph build_condensation(const MixedGuidanceGraph& g, const SccResult& scc);

}  // namespace mggo
