#include "mggo/guidance_graph.hpp"

#include <cmath>

namespace mggo {

std::string_view to_string(EdgeDir d) {
  switch (d) {
    case EdgeDir::Forward: return "forward";
    case EdgeDir::Backward: return "backward";
    case EdgeDir::Both: return "both";
  }
  return "?";
}

EdgeDir parse_edge_dir(std::string_view s) {
  if (s == "forward") return EdgeDir::Forward;
  if (s == "backward") return EdgeDir::Backward;
  if (s == "both") return EdgeDir::Both;
  throw Error(ErrorKind::Parse, "unknown edge direction '" + std::string(s) + "'");
}

void WeightBounds::validate() const {
  if (!(std::isfinite(lower) && std::isfinite(upper) && lower > 0.0 && lower <= upper)) {
    throw Error(ErrorKind::InvalidArgument, "weight bounds must satisfy 0 < lower <= upper");
  }
}

MixedGuidanceGraph::MixedGuidanceGraph(BaseGraphPtr base, WeightBounds bounds)
    : base_(std::move(base)), bounds_(bounds) {
  if (!base_) throw Error(ErrorKind::InvalidArgument, "null base graph");
  bounds_.validate();
  const auto m = static_cast<std::size_t>(base_->num_edges());
  dirs_.assign(m, EdgeDir::Both);
  w_forward_.assign(m, 1.0);
  w_backward_.assign(m, 1.0);
  self_loop_.assign(static_cast<std::size_t>(base_->map().cell_count()), 0.0);
  for (CellId c : base_->vertices()) self_loop_[static_cast<std::size_t>(c)] = 1.0;
}

void MixedGuidanceGraph::set_edge(int edge, EdgeDir d, double w_forward, double w_backward) {
  const auto e = static_cast<std::size_t>(edge);
  dirs_[e] = d;
  w_forward_[e] = has_forward(d) ? w_forward : 0.0;
  w_backward_[e] = has_backward(d) ? w_backward : 0.0;
}

void MixedGuidanceGraph::set_dir(int edge, EdgeDir d) {
  const auto e = static_cast<std::size_t>(edge);
  const double live = dirs_[e] == EdgeDir::Backward ? w_backward_[e] : w_forward_[e];
  const double f = has_forward(dirs_[e]) ? w_forward_[e] : live;
  const double b = has_backward(dirs_[e]) ? w_backward_[e] : live;
  set_edge(edge, d, f, b);
}

void MixedGuidanceGraph::set_self_loop(CellId cell, double w) {
  self_loop_[static_cast<std::size_t>(cell)] = w;
}

void MixedGuidanceGraph::reverse(int edge) {
  const auto e = static_cast<std::size_t>(edge);
  if (dirs_[e] == EdgeDir::Both) return;
  dirs_[e] = dirs_[e] == EdgeDir::Forward ? EdgeDir::Backward : EdgeDir::Forward;
  std::swap(w_forward_[e], w_backward_[e]);
}

bool MixedGuidanceGraph::has_move(CellId from, Heading h) const {
  const int e = base_->edge_at(from, h);
  if (e < 0) return false;
  const EdgeDir d = dirs_[static_cast<std::size_t>(e)];
  return base_->edges()[static_cast<std::size_t>(e)].u == from ? has_forward(d) : has_backward(d);
}

double MixedGuidanceGraph::move_weight(CellId from, Heading h) const {
  const int e = base_->edge_at(from, h);
  if (e < 0) return 0.0;
  const auto ei = static_cast<std::size_t>(e);
  return base_->edges()[ei].u == from ? w_forward_[ei] : w_backward_[ei];
}

void MixedGuidanceGraph::set_move_weight(CellId from, Heading h, double w) {
  const int e = base_->edge_at(from, h);
  if (e < 0) throw Error(ErrorKind::InvalidArgument, "no base edge in that direction");
  const auto ei = static_cast<std::size_t>(e);
  if (base_->edges()[ei].u == from) {
    w_forward_[ei] = w;
  } else {
    w_backward_[ei] = w;
  }
}

std::optional<CellId> MixedGuidanceGraph::move_target(CellId from, Heading h) const {
  if (!has_move(from, h)) return std::nullopt;
  const auto& e = base_->edges()[static_cast<std::size_t>(base_->edge_at(from, h))];
  return e.u == from ? e.v : e.u;
}

int MixedGuidanceGraph::edge_count() const {
  int moves = 0;
  for (EdgeDir d : dirs_) moves += d == EdgeDir::Both ? 2 : 1;
  return moves + base_->num_vertices();
}

int MixedGuidanceGraph::count_dir(EdgeDir d) const {
  int n = 0;
  for (EdgeDir x : dirs_) n += x == d ? 1 : 0;
  return n;
}

double MixedGuidanceGraph::unidirectional_ratio() const {
  const int non_bridge = base_->num_non_bridge_edges();
  if (non_bridge == 0) return 0.0;
  int uni = 0;
  for (int e = 0; e < base_->num_edges(); ++e) {
    if (!base_->is_bridge(e) && dirs_[static_cast<std::size_t>(e)] != EdgeDir::Both) ++uni;
  }
  return static_cast<double>(uni) / non_bridge;
}

void MixedGuidanceGraph::validate() const {
  auto in_bounds = [&](double w) {
    return std::isfinite(w) && w >= bounds_.lower && w <= bounds_.upper;
  };
  for (int e = 0; e < base_->num_edges(); ++e) {
    const auto ei = static_cast<std::size_t>(e);
    const EdgeDir d = dirs_[ei];
    if (base_->is_bridge(e) && d != EdgeDir::Both) {
      throw Error(ErrorKind::Invariant, "bridge edge " + std::to_string(e) + " is not bidirected");
    }
    if (has_forward(d) ? !in_bounds(w_forward_[ei]) : w_forward_[ei] != 0.0) {
      throw Error(ErrorKind::Invariant, "edge " + std::to_string(e) + " has an invalid forward weight");
    }
    if (has_backward(d) ? !in_bounds(w_backward_[ei]) : w_backward_[ei] != 0.0) {
      throw Error(ErrorKind::Invariant, "edge " + std::to_string(e) + " has an invalid backward weight");
    }
  }
  for (CellId c : base_->vertices()) {
    if (!in_bounds(self_loop_[static_cast<std::size_t>(c)])) {
      throw Error(ErrorKind::Invariant, "vertex " + std::to_string(c) + " has an invalid self-loop cost");
    }
  }
  if (edge_count() > base_->max_mixed_edges()) {
    throw Error(ErrorKind::Invariant, "edge count exceeds the maximum for this base graph");
  }
}

bool MixedGuidanceGraph::operator==(const MixedGuidanceGraph& other) const {
  return (base_ == other.base_ || base_->map().serialize() == other.base_->map().serialize()) &&
         bounds_ == other.bounds_ && dirs_ == other.dirs_ && w_forward_ == other.w_forward_ &&
         w_backward_ == other.w_backward_ && self_loop_ == other.self_loop_;
}

}  // namespace mggo
