#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mggo/pibt.hpp"

namespace mggo {

enum class PriorityMode : std::uint8_t {
  /// Agents that have waited longest since their last goal go first.
  ElapsedTime,
  /// Agents with the smallest remaining cost-to-go go first.
  DistToGoal,
};

std::string_view to_string(PriorityMode m);
PriorityMode parse_priority_mode(std::string_view s);

/// Traffic tensor channels: moves east/south/west/north counted at the
/// source cell, then wait, rotate CW and rotate CCW.
inline constexpr int kTrafficChannels = 7;
inline constexpr int kTrafficWait = 4;
inline constexpr int kTrafficRotateCW = 5;
inline constexpr int kTrafficRotateCCW = 6;

struct SimConfig {
  int num_agents = 10;
  int horizon = 500;
  std::uint64_t seed = 0;
  PriorityMode priority = PriorityMode::DistToGoal;

  void validate(const BaseGraph& base) const;
};

struct SimOutcome {
  double throughput = 0.0;
  double wait_ratio = 0.0;
  double rotate_ratio = 0.0;
  long long goals_reached = 0;
  /// Raw action counts, [H, W, 7]; sums to num_agents * horizon.
  Tensor traffic;
  bool success = true;
  /// Audit counters; nonzero only if the planner is broken.
  long long vertex_conflicts = 0;
  long long swap_conflicts = 0;

  bool operator==(const SimOutcome&) const = default;
};

/// Per-timestep, per-agent record passed to an optional trace sink.
struct TraceRow {
  int timestep;
  int agent;
  CellId vertex;
  Heading heading;
  Action action;
  CellId goal;
  bool reached_goal;
};
using TraceSink = std::function<void(const TraceRow&)>;

/// Lifelong MAPF with PIBT. Agents start on distinct seeded cells with
/// seeded headings; goals are drawn uniformly from passable cells other than
/// the agent's current cell. Deterministic given (graph, config).
SimOutcome run_simulation(const MixedGuidanceGraph& g, const SimConfig& cfg,
                          const TraceSink& trace = {});
/// Same, reusing a cost-to-go cache built for `g`.
SimOutcome run_simulation(const MixedGuidanceGraph& g, const SimConfig& cfg, CostToGoCache& cache,
                          const TraceSink& trace = {});

}  // namespace mggo
