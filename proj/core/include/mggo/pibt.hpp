#pragma once

#include <span>
#include <vector>

#include "mggo/cost_to_go.hpp"

namespace mggo {

enum class Action : std::uint8_t { Forward, RotateCW, RotateCCW, Wait };

std::string_view to_string(Action a);

struct AgentState {
  CellId vertex = kNoCell;
  Heading heading = Heading::East;
  CellId goal = kNoCell;
  /// Timesteps since the agent last reached a goal.
  int elapsed = 0;
  /// Larger plans first; ties go to the lower agent index.
  double priority = 0.0;
  /// Set after the agent turned aside to let a pusher through; it then
  /// prefers stepping forward over its own plan for one step.
  bool yielding = false;
};

/// One PIBT step under the rotational motion model.
///
/// Agents are planned in descending priority. Each agent ranks its feasible
/// actions by action cost plus the cost-to-go of the resulting state (ties:
/// forward, rotate CW, rotate CCW, wait). Only a forward action reserves a
/// new vertex; rotations and waits reserve the current one. A forward move
/// into an undecided agent's cell pushes that agent via priority
/// inheritance, and the pusher backtracks if the pushed agent cannot leave.
/// A pushed agent that cannot leave turns toward a free neighbour instead
/// of waiting; `escaped` (if given) flags those agents, and the caller sets
/// `yielding` so they step forward first on the next call. Without that the
/// pushed agent turns back to its own heading and dense groups livelock.
/// The returned actions are free of vertex and swap conflicts.
std::vector<Action> pibt_step(std::span<const AgentState> agents, const MixedGuidanceGraph& g,
                              CostToGoCache& costs, std::vector<char>* escaped = nullptr);

/// Applies `action` to a state, ignoring conflicts.
AgentState apply_action(const MixedGuidanceGraph& g, AgentState s, Action action);

}  // namespace mggo
