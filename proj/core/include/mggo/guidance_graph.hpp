#pragma once

#include <optional>
#include <vector>

#include "mggo/base_graph.hpp"

namespace mggo {

/// Direction state of one undirected base edge {u, v} with u < v.
enum class EdgeDir : std::uint8_t { Forward, Backward, Both };

std::string_view to_string(EdgeDir d);
EdgeDir parse_edge_dir(std::string_view s);

struct WeightBounds {
  double lower = 0.1;
  double upper = 100.0;

  void validate() const;
  double midpoint() const { return 0.5 * (lower + upper); }
  bool operator==(const WeightBounds&) const = default;
};

/// Directed weighted graph over a base grid graph: every undirected edge is
/// Forward (u -> v), Backward (v -> u) or Both, and every vertex owns one
/// self-loop whose cost applies to waiting and to each 90 degree rotation.
///
/// Weights of absent directions are stored as 0. Reversing a unidirectional
/// edge moves its weight to the new direction.
class MixedGuidanceGraph {
 public:
  /// The fully bidirected graph with every weight 1.
  explicit MixedGuidanceGraph(BaseGraphPtr base, WeightBounds bounds = {});

  const BaseGraph& base() const noexcept { return *base_; }
  const BaseGraphPtr& base_ptr() const noexcept { return base_; }
  const WeightBounds& bounds() const noexcept { return bounds_; }

  EdgeDir dir(int edge) const { return dirs_[static_cast<std::size_t>(edge)]; }
  double forward_weight(int edge) const { return w_forward_[static_cast<std::size_t>(edge)]; }
  double backward_weight(int edge) const { return w_backward_[static_cast<std::size_t>(edge)]; }
  double self_loop(CellId cell) const { return self_loop_[static_cast<std::size_t>(cell)]; }

  /// Sets direction and both directional weights; the weight of an absent
  /// direction is stored as 0 regardless of the argument.
  void set_edge(int edge, EdgeDir d, double w_forward, double w_backward);
  /// Sets direction keeping live weights; a newly live direction inherits
  /// the weight of the other direction.
  void set_dir(int edge, EdgeDir d);
  void set_self_loop(CellId cell, double w);
  /// Forward <-> Backward, carrying the weight. Both is left unchanged.
  void reverse(int edge);

  bool has_move(CellId from, Heading h) const;
  /// Weight of the move edge leaving `from` toward `h`; 0 when absent.
  double move_weight(CellId from, Heading h) const;
  void set_move_weight(CellId from, Heading h, double w);
  /// Destination of the move edge leaving `from` toward `h`, if it exists.
  std::optional<CellId> move_target(CellId from, Heading h) const;

  /// |E_mg|: live directed move edges plus one self-loop per vertex.
  int edge_count() const;
  int count_dir(EdgeDir d) const;
  /// Unidirectional non-bridge edges over all non-bridge edges; 0 when the
  /// base has no non-bridge edge.
  double unidirectional_ratio() const;

  /// Throws Error(Invariant) on any violated structural or weight invariant.
  void validate() const;

  bool operator==(const MixedGuidanceGraph& other) const;

 private:
  BaseGraphPtr base_;
  WeightBounds bounds_;
  std::vector<EdgeDir> dirs_;
  std::vector<double> w_forward_;
  std::vector<double> w_backward_;
  std::vector<double> self_loop_;
};

inline bool has_forward(EdgeDir d) { return d != EdgeDir::Backward; }
inline bool has_backward(EdgeDir d) { return d != EdgeDir::Forward; }

}  // namespace mggo
