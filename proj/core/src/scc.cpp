#include "mggo/scc.hpp"

#include <algorithm>

namespace mggo {

SccResult tarjan_scc(const MixedGuidanceGraph& g) {
  const BaseGraph& base = g.base();
  const auto cells = static_cast<std::size_t>(base.map().cell_count());
  SccResult result;
  result.component.assign(cells, -1);
  std::vector<int> disc(cells, -1), low(cells, 0);
  std::vector<std::uint8_t> on_stack(cells, 0);
  std::vector<CellId> scc_stack;
  struct Frame {
    CellId cell;
    int next_heading;
  };
  std::vector<Frame> call;
  int timer = 0;

  for (CellId root : base.vertices()) {
    if (disc[static_cast<std::size_t>(root)] >= 0) continue;
    call.push_back({root, 0});
    disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
    scc_stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = 1;
    ++result.work;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto u = static_cast<std::size_t>(f.cell);
      if (f.next_heading < 4) {
        const Heading h = heading_from_index(f.next_heading++);
        const auto target = g.move_target(f.cell, h);
        if (!target) continue;
        ++result.work;
        const auto w = static_cast<std::size_t>(*target);
        if (disc[w] < 0) {
          disc[w] = low[w] = timer++;
          scc_stack.push_back(*target);
          on_stack[w] = 1;
          ++result.work;
          call.push_back({*target, 0});
        } else if (on_stack[w]) {
          low[u] = std::min(low[u], disc[w]);
        }
        continue;
      }
      const CellId done = f.cell;
      call.pop_back();
      if (low[u] == disc[u]) {
        CellId x;
        do {
          x = scc_stack.back();
          scc_stack.pop_back();
          on_stack[static_cast<std::size_t>(x)] = 0;
          result.component[static_cast<std::size_t>(x)] = result.count;
        } while (x != done);
        ++result.count;
      }
      if (!call.empty()) {
        const auto p = static_cast<std::size_t>(call.back().cell);
        low[p] = std::min(low[p], low[u]);
      }
    }
  }
  return result;
}

bool is_strongly_connected(const MixedGuidanceGraph& g) { return tarjan_scc(g).count == 1; }

CondensationGraph build_condensation(const MixedGuidanceGraph& g, const SccResult& scc) {
  CondensationGraph d;
  d.num_meta_vertices = scc.count;
  for (CellId c : g.base().vertices()) {
    const int from = scc.component[static_cast<std::size_t>(c)];
    ++d.work;
    for (Heading h : kHeadings) {
      if (auto t = g.move_target(c, h)) {
        ++d.work;
        const int to = scc.component[static_cast<std::size_t>(*t)];
        if (to != from) d.meta_edges.emplace_back(from, to);
      }
    }
  }
  std::sort(d.meta_edges.begin(), d.meta_edges.end());
  d.meta_edges.erase(std::unique(d.meta_edges.begin(), d.meta_edges.end()), d.meta_edges.end());
  d.in_degree.assign(static_cast<std::size_t>(scc.count), 0);
  d.out_degree.assign(static_cast<std::size_t>(scc.count), 0);
  for (const auto& [a, b] : d.meta_edges) {
    ++d.out_degree[static_cast<std::size_t>(a)];
    ++d.in_degree[static_cast<std::size_t>(b)];
  }
  return d;
}

}  // namespace mggo
