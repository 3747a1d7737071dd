#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mggo/grid_map.hpp"

namespace mggo {

/// Undirected grid edge with u < v. Since ids are row-major, v is always
/// the east (v == u + 1) or south (v == u + width) neighbour of u, and the
/// canonical "forward" direction is u -> v.
struct UndirectedEdge {
  CellId u;
  CellId v;
  bool operator==(const UndirectedEdge&) const = default;
};

/// The undirected 4-connected graph over the passable cells of a map,
/// annotated with its bridges. Immutable once built.
class BaseGraph {
 public:
  explicit BaseGraph(GridMap map);

  const GridMap& map() const noexcept { return map_; }
  int height() const noexcept { return map_.height(); }
  int width() const noexcept { return map_.width(); }

  std::span<const CellId> vertices() const noexcept { return vertices_; }
  std::span<const UndirectedEdge> edges() const noexcept { return edges_; }
  /// Edge indices (into edges()) of every bridge, ascending.
  std::span<const int> bridges() const noexcept { return bridges_; }

  int num_vertices() const noexcept { return static_cast<int>(vertices_.size()); }
  int num_edges() const noexcept { return static_cast<int>(edges_.size()); }
  int num_non_bridge_edges() const noexcept { return num_edges() - static_cast<int>(bridges_.size()); }

  bool is_bridge(int edge) const { return is_bridge_[static_cast<std::size_t>(edge)] != 0; }
  /// True when the graph has no bridges.
  bool biconnected() const noexcept { return bridges_.empty(); }

  /// Index of the edge leaving `cell` toward `h`, or -1.
  int edge_at(CellId cell, Heading h) const {
    return edge_at_[static_cast<std::size_t>(cell) * 4 + static_cast<std::size_t>(index(h))];
  }
  /// Position of `cell` in vertices(), or -1 for obstacles.
  int vertex_index(CellId cell) const { return vertex_index_[static_cast<std::size_t>(cell)]; }
  /// Heading from u to v of the edge; u -> v is always east or south.
  Heading forward_heading(int edge) const;

  /// Upper bound on the directed edge count of any mixed guidance graph
  /// over this base: two move edges per undirected edge plus one self-loop
  /// per vertex.
  int max_mixed_edges() const noexcept { return 2 * num_edges() + num_vertices(); }

 private:
  void find_bridges();

  GridMap map_;
  std::vector<CellId> vertices_;
  std::vector<UndirectedEdge> edges_;
  std::vector<int> bridges_;
  std::vector<std::uint8_t> is_bridge_;
  std::vector<int> edge_at_;
  std::vector<int> vertex_index_;
};

using BaseGraphPtr = std::shared_ptr<const BaseGraph>;

BaseGraphPtr build_base_graph(GridMap map);

}  // namespace mggo
