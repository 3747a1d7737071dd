#include "mggo/base_graph.hpp"

#include <algorithm>

namespace mggo {

BaseGraph::BaseGraph(GridMap map) : map_(std::move(map)) {
  const int cells = map_.cell_count();
  edge_at_.assign(static_cast<std::size_t>(cells) * 4, -1);
  vertex_index_.assign(static_cast<std::size_t>(cells), -1);
  for (CellId c = 0; c < cells; ++c) {
    if (!map_.passable(c)) continue;
    vertex_index_[static_cast<std::size_t>(c)] = static_cast<int>(vertices_.size());
    vertices_.push_back(c);
  }
  for (CellId c : vertices_) {
    for (Heading h : {Heading::East, Heading::South}) {
      if (auto n = map_.neighbor(c, h)) {
        const int e = static_cast<int>(edges_.size());
        edges_.push_back({c, *n});
        edge_at_[static_cast<std::size_t>(c) * 4 + static_cast<std::size_t>(index(h))] = e;
        edge_at_[static_cast<std::size_t>(*n) * 4 + static_cast<std::size_t>(index(opposite(h)))] = e;
      }
    }
  }
  find_bridges();
}

Heading BaseGraph::forward_heading(int edge) const {
  const auto& e = edges_[static_cast<std::size_t>(edge)];
  return e.v == e.u + 1 ? Heading::East : Heading::South;
}

// Iterative DFS low-link. Parent edges are tracked by index so a tree edge is
// never mistaken for a back edge.
void BaseGraph::find_bridges() {
  is_bridge_.assign(edges_.size(), 0);
  const std::size_t n = map_.cell_count();
  std::vector<int> disc(n, -1), low(n, 0), parent_edge(n, -1);
  struct Frame {
    CellId cell;
    int next_heading;
  };
  std::vector<Frame> stack;
  int timer = 0;
  for (CellId root : vertices_) {
    if (disc[static_cast<std::size_t>(root)] >= 0) continue;
    disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
    stack.push_back({root, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto u = static_cast<std::size_t>(f.cell);
      if (f.next_heading < 4) {
        const Heading h = heading_from_index(f.next_heading++);
        const int e = edge_at(f.cell, h);
        if (e < 0 || e == parent_edge[u]) continue;
        const auto& edge = edges_[static_cast<std::size_t>(e)];
        const CellId w = edge.u == f.cell ? edge.v : edge.u;
        const auto wi = static_cast<std::size_t>(w);
        if (disc[wi] < 0) {
          disc[wi] = low[wi] = timer++;
          parent_edge[wi] = e;
          stack.push_back({w, 0});
        } else {
          low[u] = std::min(low[u], disc[wi]);
        }
        continue;
      }
      const CellId done = f.cell;
      const int pe = parent_edge[u];
      stack.pop_back();
      if (pe >= 0) {
        const auto& edge = edges_[static_cast<std::size_t>(pe)];
        const auto p = static_cast<std::size_t>(edge.u == done ? edge.v : edge.u);
        low[p] = std::min(low[p], low[u]);
        if (low[u] > disc[p]) is_bridge_[static_cast<std::size_t>(pe)] = 1;
      }
    }
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (is_bridge_[e]) bridges_.push_back(static_cast<int>(e));
  }
}

BaseGraphPtr build_base_graph(GridMap map) {
  return std::make_shared<const BaseGraph>(std::move(map));
}

}  // namespace mggo
