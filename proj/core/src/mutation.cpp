#include "mggo/mutation.hpp"

#include <algorithm>
#include <array>

namespace mggo {

namespace {

bool unidirectional(const MixedGuidanceGraph& g, int e) { return g.dir(e) != EdgeDir::Both; }

/// First `k` entries of `items` become a uniform sample without replacement.
template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(items[i], items[i + uniform_index(rng, items.size() - i)]);
  }
}

}  // namespace

std::string_view to_string(MutationOp op) {
  switch (op) {
    case MutationOp::KEdges: return "k-edges";
    case MutationOp::KVertices: return "k-vertices";
    case MutationOp::RandomCycle: return "random-cycle";
  }
  return "?";
}

int sample_geometric_k(Rng& rng, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "geometric p must be in (0, 1]");
  int k = 1;
  while (uniform_unit(rng) >= p) ++k;
  return k;
}

MixedGuidanceGraph mutate_k_edges(const MixedGuidanceGraph& g, Rng& rng) {
  std::vector<int> edges;
  for (int e = 0; e < g.base().num_edges(); ++e) {
    if (unidirectional(g, e)) edges.push_back(e);
  }
  MixedGuidanceGraph out = g;
  const int k = sample_geometric_k(rng);
  if (edges.empty()) return out;
  const auto take = std::min(edges.size(), static_cast<std::size_t>(k));
  partial_shuffle(edges, take, rng);
  for (std::size_t i = 0; i < take; ++i) out.reverse(edges[i]);
  return out;
}

MixedGuidanceGraph mutate_k_vertices(const MixedGuidanceGraph& g, Rng& rng) {
  const BaseGraph& base = g.base();
  std::vector<CellId> cells;
  for (CellId c : base.vertices()) {
    for (Heading h : kHeadings) {
      const int e = base.edge_at(c, h);
      if (e >= 0 && unidirectional(g, e)) {
        cells.push_back(c);
        break;
      }
    }
  }
  MixedGuidanceGraph out = g;
  const int k = sample_geometric_k(rng);
  if (cells.empty()) return out;
  const auto take = std::min(cells.size(), static_cast<std::size_t>(k));
  partial_shuffle(cells, take, rng);
  std::vector<std::uint8_t> flip(static_cast<std::size_t>(base.num_edges()), 0);
  for (std::size_t i = 0; i < take; ++i) {
    for (Heading h : kHeadings) {
      const int e = base.edge_at(cells[i], h);
      if (e >= 0 && unidirectional(g, e)) flip[static_cast<std::size_t>(e)] = 1;
    }
  }
  for (int e = 0; e < base.num_edges(); ++e) {
    if (flip[static_cast<std::size_t>(e)]) out.reverse(e);
  }
  return out;
}

MixedGuidanceGraph mutate_random_cycle(const MixedGuidanceGraph& g, Rng& rng) {
  const BaseGraph& base = g.base();
  auto out_edge = [&](CellId c, Heading h) {
    const int e = base.edge_at(c, h);
    return e >= 0 && unidirectional(g, e) && g.has_move(c, h) ? e : -1;
  };
  std::vector<CellId> starts;
  for (CellId c : base.vertices()) {
    for (Heading h : kHeadings) {
      if (out_edge(c, h) >= 0) {
        starts.push_back(c);
        break;
      }
    }
  }
  MixedGuidanceGraph out = g;
  if (starts.empty()) return out;

  enum : std::uint8_t { kUnseen, kOnStack, kDone };
  std::vector<std::uint8_t> state(static_cast<std::size_t>(base.map().cell_count()), kUnseen);
  struct Frame {
    CellId cell;
    int via;  // edge used to enter this cell, -1 at the root
    std::array<Heading, 4> order;
    int next;
  };
  auto shuffled = [&rng] {
    std::array<Heading, 4> order = kHeadings;
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[uniform_index(rng, i + 1)]);
    return order;
  };

  std::vector<Frame> stack;
  const CellId root = starts[uniform_index(rng, starts.size())];
  state[static_cast<std::size_t>(root)] = kOnStack;
  stack.push_back({root, -1, shuffled(), 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next == 4) {
      state[static_cast<std::size_t>(f.cell)] = kDone;
      stack.pop_back();
      continue;
    }
    const Heading h = f.order[static_cast<std::size_t>(f.next++)];
    const int e = out_edge(f.cell, h);
    if (e < 0) continue;
    const CellId to = *g.move_target(f.cell, h);
    const auto s = state[static_cast<std::size_t>(to)];
    if (s == kOnStack) {
      out.reverse(e);
      for (auto it = stack.rbegin(); it->cell != to; ++it) out.reverse(it->via);
      return out;
    }
    if (s == kUnseen) {
      state[static_cast<std::size_t>(to)] = kOnStack;
      stack.push_back({to, e, shuffled(), 0});
    }
  }
  return out;
}

MixedGuidanceGraph mutate(const MixedGuidanceGraph& g, MutationOp op, Rng& rng) {
  switch (op) {
    case MutationOp::KEdges: return mutate_k_edges(g, rng);
    case MutationOp::KVertices: return mutate_k_vertices(g, rng);
    case MutationOp::RandomCycle: return mutate_random_cycle(g, rng);
  }
  throw Error(ErrorKind::Internal, "unknown mutation operator");
}

}  // namespace mggo
