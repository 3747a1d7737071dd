#include "mggo/cost_to_go.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>

namespace mggo {

// Backward Dijkstra over (cell, heading) states.
CostToGo::CostToGo(const MixedGuidanceGraph& g, CellId goal) : goal_(goal) {
  const BaseGraph& base = g.base();
  const auto& map = base.map();
  if (goal < 0 || goal >= map.cell_count() || !map.passable(goal)) {
    throw Error(ErrorKind::InvalidArgument, "cost-to-go goal is not a passable cell");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  cost_.assign(static_cast<std::size_t>(map.cell_count()) * 4, inf);

  using Entry = std::pair<double, int>;  // (cost, state)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  for (Heading h : kHeadings) {
    const int s = goal * 4 + index(h);
    cost_[static_cast<std::size_t>(s)] = 0.0;
    open.emplace(0.0, s);
  }
  while (!open.empty()) {
    const auto [c, s] = open.top();
    open.pop();
    if (c > cost_[static_cast<std::size_t>(s)]) continue;
    const CellId v = s / 4;
    const Heading h = heading_from_index(s % 4);
    auto relax = [&](int pred, double w) {
      const double nc = c + w;
      if (nc < cost_[static_cast<std::size_t>(pred)]) {
        cost_[static_cast<std::size_t>(pred)] = nc;
        open.emplace(nc, pred);
      }
    };
    // Arrived at (v, h) by moving forward from the cell behind v.
    if (auto u = map.neighbor(v, opposite(h)); u && g.has_move(*u, h)) {
      relax(*u * 4 + index(h), g.move_weight(*u, h));
    }
    // Arrived by rotating in place from either side.
    relax(v * 4 + index(rotate_ccw(h)), g.self_loop(v));
    relax(v * 4 + index(rotate_cw(h)), g.self_loop(v));
  }
  for (CellId v : base.vertices()) {
    for (Heading h : kHeadings) {
      if (!std::isfinite(at(v, h))) {
        throw Error(ErrorKind::Internal, "goal unreachable from cell " + std::to_string(v) +
                                             "; graph is not strongly connected");
      }
    }
  }
}

CostToGoCache::CostToGoCache(const MixedGuidanceGraph& g)
    : graph_(&g), tables_(static_cast<std::size_t>(g.base().map().cell_count())) {}

const CostToGo& CostToGoCache::get(CellId goal) {
  auto& slot = tables_[static_cast<std::size_t>(goal)];
  if (!slot) {
    slot = std::make_unique<CostToGo>(*graph_, goal);
    ++computed_;
  }
  return *slot;
}

}  // namespace mggo
