#include "mggo/pibt.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace mggo {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Forward: return "forward";
    case Action::RotateCW: return "rotate_cw";
    case Action::RotateCCW: return "rotate_ccw";
    case Action::Wait: return "wait";
  }
  return "?";
}

AgentState apply_action(const MixedGuidanceGraph& g, AgentState s, Action action) {
  switch (action) {
    case Action::Forward:
      if (auto t = g.move_target(s.vertex, s.heading)) s.vertex = *t;
      break;
    case Action::RotateCW: s.heading = rotate_cw(s.heading); break;
    case Action::RotateCCW: s.heading = rotate_ccw(s.heading); break;
    case Action::Wait: break;
  }
  return s;
}

namespace {

class Planner {
 public:
  Planner(std::span<const AgentState> agents, const MixedGuidanceGraph& g, CostToGoCache& costs)
      : agents_(agents), g_(g), costs_(costs), actions_(agents.size(), Action::Wait),
        next_(agents.size(), kNoCell), escaped_(agents.size(), 0) {
    const auto cells = static_cast<std::size_t>(g.base().map().cell_count());
    occupied_now_.assign(cells, -1);
    occupied_next_.assign(cells, -1);
    for (std::size_t a = 0; a < agents.size(); ++a) {
      occupied_now_[static_cast<std::size_t>(agents[a].vertex)] = static_cast<int>(a);
    }
  }

  std::vector<char>& escaped() { return escaped_; }

  std::vector<Action> run() {
    std::vector<int> order(agents_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return agents_[static_cast<std::size_t>(a)].priority > agents_[static_cast<std::size_t>(b)].priority;
    });
    for (int a : order) {
      if (next_[static_cast<std::size_t>(a)] == kNoCell) plan(a);
    }
    return actions_;
  }

 private:
  struct Candidate {
    double score;
    Action action;
    CellId target;
  };

  bool plan(int a, bool pushed = false) {
    const auto ai = static_cast<std::size_t>(a);
    const AgentState& s = agents_[ai];
    const CostToGo& table = costs_.get(s.goal);
    const double loop = g_.self_loop(s.vertex);

    std::array<Candidate, 4> cands{};
    std::size_t n = 0;
    if (auto t = g_.move_target(s.vertex, s.heading)) {
      const double score = g_.move_weight(s.vertex, s.heading) + table.at(*t, s.heading);
      cands[n++] = {s.yielding ? -1.0 : score, Action::Forward, *t};
    }
    cands[n++] = {loop + table.at(s.vertex, rotate_cw(s.heading)), Action::RotateCW, s.vertex};
    cands[n++] = {loop + table.at(s.vertex, rotate_ccw(s.heading)), Action::RotateCCW, s.vertex};
    cands[n++] = {loop + table.at(s.vertex, s.heading), Action::Wait, s.vertex};
    // Candidates were pushed in tie-break order, so a stable sort keeps it.
    std::stable_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(n),
                     [](const Candidate& x, const Candidate& y) { return x.score < y.score; });

    for (std::size_t i = 0; i < n; ++i) {
      const Candidate& c = cands[i];
      const auto ti = static_cast<std::size_t>(c.target);
      if (occupied_next_[ti] != -1) continue;
      const int b = occupied_now_[ti];
      const bool moving = c.action == Action::Forward;
      if (moving && b != -1 && next_[static_cast<std::size_t>(b)] == s.vertex) continue;

      occupied_next_[ti] = a;
      next_[ai] = c.target;
      actions_[ai] = c.action;
      if (!moving || b == -1) return true;
      if (next_[static_cast<std::size_t>(b)] == kNoCell && !plan(b, true)) continue;
      return true;
    }
    // Nothing works: stay put. This may overwrite a reservation the caller
    // made on our cell, which the caller then abandons. A pushed agent turns
    // toward a free neighbour instead of waiting, so the push can succeed on
    // the next step rather than repeat forever.
    next_[ai] = s.vertex;
    occupied_next_[static_cast<std::size_t>(s.vertex)] = a;
    actions_[ai] = pushed ? escape_rotation(s, table) : Action::Wait;
    escaped_[ai] = actions_[ai] != Action::Wait;
    return false;
  }

  /// Rotation toward the best neighbour nobody has reserved for the next
  /// step, preferring currently empty ones; Wait if there is none.
  Action escape_rotation(const AgentState& s, const CostToGo& table) const {
    Action best = Action::Wait;
    bool best_free = false;
    double best_score = 0.0;
    for (Action r : {Action::RotateCW, Action::RotateCCW}) {
      const Heading h = r == Action::RotateCW ? rotate_cw(s.heading) : rotate_ccw(s.heading);
      const auto t = g_.move_target(s.vertex, h);
      if (!t || occupied_next_[static_cast<std::size_t>(*t)] != -1) continue;
      const bool free = occupied_now_[static_cast<std::size_t>(*t)] == -1;
      const double score = g_.move_weight(s.vertex, h) + table.at(*t, h);
      if (best == Action::Wait || (free && !best_free) || (free == best_free && score < best_score)) {
        best = r;
        best_free = free;
        best_score = score;
      }
    }
    return best;
  }

  std::span<const AgentState> agents_;
  const MixedGuidanceGraph& g_;
  CostToGoCache& costs_;
  std::vector<Action> actions_;
  std::vector<CellId> next_;
  std::vector<char> escaped_;
  std::vector<int> occupied_now_;
  std::vector<int> occupied_next_;
};

}  // namespace

std::vector<Action> pibt_step(std::span<const AgentState> agents, const MixedGuidanceGraph& g,
                              CostToGoCache& costs, std::vector<char>* escaped) {
  Planner planner(agents, g, costs);
  auto actions = planner.run();
  if (escaped) *escaped = std::move(planner.escaped());
  return actions;
}

}  // namespace mggo
