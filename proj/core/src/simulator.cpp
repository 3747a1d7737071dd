#include "mggo/simulator.hpp"

#include <algorithm>

namespace mggo {

std::string_view to_string(PriorityMode m) {
  return m == PriorityMode::ElapsedTime ? "elapsed" : "dist";
}

PriorityMode parse_priority_mode(std::string_view s) {
  if (s == "elapsed" || s == "elapsed-time") return PriorityMode::ElapsedTime;
  if (s == "dist" || s == "dist-to-goal") return PriorityMode::DistToGoal;
  throw Error(ErrorKind::InvalidArgument, "unknown priority mode '" + std::string(s) + "'");
}

void SimConfig::validate(const BaseGraph& base) const {
  if (num_agents < 1 || num_agents > base.num_vertices()) {
    throw Error(ErrorKind::InvalidArgument, "agent count must be in [1, " +
                                                std::to_string(base.num_vertices()) + "]");
  }
  if (base.num_vertices() < 2) {
    throw Error(ErrorKind::InvalidArgument, "simulation needs at least two passable cells");
  }
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
}

namespace {

CellId draw_goal(Rng& rng, const BaseGraph& base, CellId current) {
  const auto verts = base.vertices();
  CellId goal = current;
  while (goal == current) goal = verts[uniform_index(rng, verts.size())];
  return goal;
}

}  // namespace

SimOutcome run_simulation(const MixedGuidanceGraph& g, const SimConfig& cfg, const TraceSink& trace) {
  CostToGoCache cache(g);
  return run_simulation(g, cfg, cache, trace);
}

SimOutcome run_simulation(const MixedGuidanceGraph& g, const SimConfig& cfg, CostToGoCache& cache,
                          const TraceSink& trace) {
  const BaseGraph& base = g.base();
  cfg.validate(base);
  if (&cache.graph() != &g) throw Error(ErrorKind::InvalidArgument, "cost cache built for another graph");

  Rng rng(cfg.seed);
  const auto n = static_cast<std::size_t>(cfg.num_agents);
  std::vector<AgentState> agents(n);
  {
    std::vector<CellId> cells(base.vertices().begin(), base.vertices().end());
    for (std::size_t i = 0; i < n; ++i) {
      std::swap(cells[i], cells[i + uniform_index(rng, cells.size() - i)]);
      agents[i].vertex = cells[i];
      agents[i].heading = heading_from_index(static_cast<int>(uniform_index(rng, 4)));
    }
    for (auto& a : agents) a.goal = draw_goal(rng, base, a.vertex);
  }

  SimOutcome out;
  out.traffic = Tensor(base.height(), base.width(), kTrafficChannels);
  long long waits = 0;
  long long rotations = 0;
  std::vector<int> landing(static_cast<std::size_t>(base.map().cell_count()), -1);

  for (int t = 0; t < cfg.horizon; ++t) {
    for (auto& a : agents) {
      a.priority = cfg.priority == PriorityMode::ElapsedTime
                       ? static_cast<double>(a.elapsed)
                       : -cache.get(a.goal).at(a.vertex, a.heading);
    }
    std::vector<char> escaped;
    const std::vector<Action> actions = pibt_step(agents, g, cache, &escaped);

    std::vector<AgentState> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = apply_action(g, agents[i], actions[i]);
      next[i].yielding = escaped[i] != 0;
      const CellId v = agents[i].vertex;
      switch (actions[i]) {
        case Action::Forward:
          out.traffic.at(v, index(agents[i].heading)) += 1.0;
          break;
        case Action::Wait:
          out.traffic.at(v, kTrafficWait) += 1.0;
          ++waits;
          break;
        case Action::RotateCW:
          out.traffic.at(v, kTrafficRotateCW) += 1.0;
          ++rotations;
          break;
        case Action::RotateCCW:
          out.traffic.at(v, kTrafficRotateCCW) += 1.0;
          ++rotations;
          break;
      }
    }

    // Conflict audit.
    for (std::size_t i = 0; i < n; ++i) {
      auto& slot = landing[static_cast<std::size_t>(next[i].vertex)];
      if (slot != -1) ++out.vertex_conflicts;
      slot = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (next[i].vertex == agents[i].vertex) continue;
      const int j = landing[static_cast<std::size_t>(agents[i].vertex)];
      if (j >= 0 && static_cast<std::size_t>(j) != i &&
          agents[static_cast<std::size_t>(j)].vertex == next[i].vertex) {
        ++out.swap_conflicts;
      }
    }
    for (const auto& a : next) landing[static_cast<std::size_t>(a.vertex)] = -1;

    for (std::size_t i = 0; i < n; ++i) {
      AgentState& a = next[i];
      const bool reached = a.vertex == a.goal;
      if (trace) {
        trace({t, static_cast<int>(i), agents[i].vertex, agents[i].heading, actions[i], agents[i].goal, reached});
      }
      if (reached) {
        ++out.goals_reached;
        a.elapsed = 0;
        a.goal = draw_goal(rng, base, a.vertex);
      } else {
        ++a.elapsed;
      }
    }
    agents = std::move(next);
  }

  const double steps = static_cast<double>(cfg.horizon);
  const double agent_steps = steps * static_cast<double>(n);
  out.throughput = static_cast<double>(out.goals_reached) / steps;
  out.wait_ratio = static_cast<double>(waits) / agent_steps;
  out.rotate_ratio = static_cast<double>(rotations) / agent_steps;
  return out;
}

}  // namespace mggo
