#include "mggo/ers.hpp"

#include <algorithm>

#include "mggo/scc.hpp"

namespace mggo {

namespace {

int bidirect_bridges(MixedGuidanceGraph& g) {
  int added = 0;
  for (int e : g.base().bridges()) {
    if (g.dir(e) != EdgeDir::Both) {
      g.set_dir(e, EdgeDir::Both);
      ++added;
    }
  }
  return added;
}

}  // namespace

ErsResult ers_repair(MixedGuidanceGraph g, std::uint64_t seed) {
  ErsResult r{std::move(g)};
  MixedGuidanceGraph& graph = r.graph;
  const BaseGraph& base = graph.base();
  r.bridges_added = bidirect_bridges(graph);

  Rng rng(seed);
  const long long cap = 10LL * std::max(1, base.num_edges());
  std::vector<int> out_edges;
  SccResult scc = tarjan_scc(graph);
  long long work = scc.work;
  while (scc.count > 1) {
    if (r.iterations >= cap) {
      throw Error(ErrorKind::Limit, "edge reversal search exceeded " + std::to_string(cap) + " iterations");
    }
    ++r.iterations;
    const CondensationGraph cond = build_condensation(graph, scc);
    work += cond.work;

    int source = -1;
    for (CellId c : base.vertices()) {
      ++work;
      const int comp = scc.component[static_cast<std::size_t>(c)];
      if (cond.in_degree[static_cast<std::size_t>(comp)] == 0) {
        source = comp;
        break;
      }
    }
    if (source < 0) throw Error(ErrorKind::Internal, "condensation graph has no source");

    out_edges.clear();
    for (CellId c : base.vertices()) {
      ++work;
      if (scc.component[static_cast<std::size_t>(c)] != source) continue;
      for (Heading h : kHeadings) {
        const auto t = graph.move_target(c, h);
        if (t && scc.component[static_cast<std::size_t>(*t)] != source) {
          out_edges.push_back(base.edge_at(c, h));
        }
      }
    }
    const int n_out = static_cast<int>(out_edges.size());
    r.min_out_edges = r.min_out_edges < 0 ? n_out : std::min(r.min_out_edges, n_out);
    const int n_rev = n_out / 2;
    if (n_rev == 0) {
      throw Error(ErrorKind::Internal, "source component has fewer than two outgoing edges");
    }
    for (int i = 0; i < n_rev; ++i) {
      const auto j = static_cast<std::size_t>(i) +
                     static_cast<std::size_t>(uniform_index(rng, static_cast<std::uint64_t>(n_out - i)));
      std::swap(out_edges[static_cast<std::size_t>(i)], out_edges[j]);
      graph.reverse(out_edges[static_cast<std::size_t>(i)]);
    }
    r.reversed_count += n_rev;

    scc = tarjan_scc(graph);
    work += scc.work;
    r.max_iteration_work = std::max(r.max_iteration_work, work);
    work = 0;
  }
  return r;
}

int min_reversal_oracle(const MixedGuidanceGraph& g, int max_orientable) {
  MixedGuidanceGraph start = g;
  bidirect_bridges(start);
  std::vector<int> orientable;
  for (int e = 0; e < start.base().num_edges(); ++e) {
    if (start.dir(e) != EdgeDir::Both) orientable.push_back(e);
  }
  const int k = static_cast<int>(orientable.size());
  if (k > max_orientable) {
    throw Error(ErrorKind::Limit, "oracle instance has " + std::to_string(k) +
                                      " orientable edges (limit " + std::to_string(max_orientable) + ")");
  }
  // Subsets in increasing popcount; the first strongly connected one is optimal.
  for (int size = 0; size <= k; ++size) {
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      if (__builtin_popcount(mask) != size) continue;
      MixedGuidanceGraph trial = start;
      for (int i = 0; i < k; ++i) {
        if (mask & (1u << i)) trial.reverse(orientable[static_cast<std::size_t>(i)]);
      }
      if (is_strongly_connected(trial)) return size;
    }
  }
  throw Error(ErrorKind::Internal, "no reversal set makes the graph strongly connected");
}

}  // namespace mggo
