#pragma once

#include <memory>
#include <vector>

#include "mggo/guidance_graph.hpp"

namespace mggo {

/// Guidance-graph cost from every (cell, heading) state to one goal cell.
///
/// Forward moves cost the move-edge weight, each 90 degree rotation costs the
/// cell's self-loop weight, and the heading at the goal is free.
class CostToGo {
 public:
  CostToGo(const MixedGuidanceGraph& g, CellId goal);

  CellId goal() const noexcept { return goal_; }
  double at(CellId cell, Heading h) const {
    return cost_[static_cast<std::size_t>(cell) * 4 + static_cast<std::size_t>(index(h))];
  }

 private:
  CellId goal_;
  std::vector<double> cost_;
};

/// Lazily computed cost-to-go tables, one per goal, for one graph.
/// Not thread-safe; give each worker its own cache.
class CostToGoCache {
 public:
  explicit CostToGoCache(const MixedGuidanceGraph& g);

  const CostToGo& get(CellId goal);
  const MixedGuidanceGraph& graph() const noexcept { return *graph_; }
  std::size_t computed() const noexcept { return computed_; }

 private:
  const MixedGuidanceGraph* graph_;
  std::vector<std::unique_ptr<CostToGo>> tables_;
  std::size_t computed_ = 0;
};

}  // namespace mggo
