#include "mggo/orientation.hpp"

#include <algorithm>
#include <array>

namespace mggo {

MixedGuidanceGraph make_unweighted(BaseGraphPtr base, WeightBounds bounds) {
  return MixedGuidanceGraph(std::move(base), bounds);
}

int max_crisscross_period(const BaseGraph& base) {
  return std::max(1, std::min(base.height(), base.width()) / 2);
}

MixedGuidanceGraph crisscross(BaseGraphPtr base, int period, WeightBounds bounds) {
  if (period < 1 || period > max_crisscross_period(*base)) {
    throw Error(ErrorKind::InvalidArgument,
                "crisscross period " + std::to_string(period) + " outside [1, " +
                    std::to_string(max_crisscross_period(*base)) + "]");
  }
  MixedGuidanceGraph g(base, bounds);
  const auto& map = base->map();
  for (int e = 0; e < base->num_edges(); ++e) {
    if (base->is_bridge(e)) continue;
    const auto& edge = base->edges()[static_cast<std::size_t>(e)];
    if (base->forward_heading(e) == Heading::East) {
      const bool east = (map.row(edge.u) / period) % 2 == 0;
      g.set_dir(e, east ? EdgeDir::Forward : EdgeDir::Backward);
    } else {
      const bool north = (map.col(edge.u) / period) % 2 == 0;
      g.set_dir(e, north ? EdgeDir::Backward : EdgeDir::Forward);
    }
  }
  return g;
}

MixedGuidanceGraph dfs_orientation(BaseGraphPtr base, std::uint64_t seed, WeightBounds bounds) {
  MixedGuidanceGraph g(base, bounds);
  Rng rng(seed);
  const auto cells = static_cast<std::size_t>(base->map().cell_count());
  std::vector<int> disc(cells, -1);
  std::vector<std::uint8_t> oriented(static_cast<std::size_t>(base->num_edges()), 0);

  struct Frame {
    CellId cell;
    std::array<Heading, 4> order;
    int next;
  };
  auto shuffled = [&rng] {
    std::array<Heading, 4> order = kHeadings;
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[uniform_index(rng, i + 1)]);
    }
    return order;
  };

  const auto verts = base->vertices();
  const CellId root = verts[uniform_index(rng, verts.size())];
  int timer = 0;
  std::vector<Frame> stack;
  disc[static_cast<std::size_t>(root)] = timer++;
  stack.push_back({root, shuffled(), 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next == 4) {
      stack.pop_back();
      continue;
    }
    const Heading h = f.order[static_cast<std::size_t>(f.next++)];
    const int e = base->edge_at(f.cell, h);
    if (e < 0 || oriented[static_cast<std::size_t>(e)]) continue;
    oriented[static_cast<std::size_t>(e)] = 1;
    const auto& edge = base->edges()[static_cast<std::size_t>(e)];
    const CellId from = f.cell;
    const CellId to = edge.u == from ? edge.v : edge.u;
    // An edge first seen from `from` is either a tree edge (to undiscovered)
    // or a back edge to an ancestor: a finished descendant would already
    // have claimed it. Both orient from -> to.
    if (!base->is_bridge(e)) {
      g.set_dir(e, edge.u == from ? EdgeDir::Forward : EdgeDir::Backward);
    }
    if (disc[static_cast<std::size_t>(to)] < 0) {
      disc[static_cast<std::size_t>(to)] = timer++;
      stack.push_back({to, shuffled(), 0});
    }
  }
  return g;
}

MixedGuidanceGraph random_orientation(BaseGraphPtr base, std::uint64_t seed, WeightBounds bounds) {
  MixedGuidanceGraph g(base, bounds);
  Rng rng(seed);
  for (int e = 0; e < base->num_edges(); ++e) {
    if (base->is_bridge(e)) continue;
    g.set_dir(e, (rng() >> 63) != 0 ? EdgeDir::Forward : EdgeDir::Backward);
  }
  return g;
}

}  // namespace mggo
