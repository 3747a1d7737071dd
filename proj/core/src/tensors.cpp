#include "mggo/tensors.hpp"

#include <algorithm>
#include <cmath>

namespace mggo {

namespace {

void check_shape(const Tensor& t, const BaseGraph& base, int channels, const char* what) {
  if (t.height() != base.height() || t.width() != base.width() || t.channels() != channels) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + ": expected shape [" + std::to_string(base.height()) + "," +
                    std::to_string(base.width()) + "," + std::to_string(channels) + "], got [" +
                    std::to_string(t.height()) + "," + std::to_string(t.width()) + "," +
                    std::to_string(t.channels()) + "]");
  }
}

void check_finite(const Tensor& t, const char* what) {
  if (!t.all_finite()) throw Error(ErrorKind::InvalidArgument, std::string(what) + " has non-finite values");
}

// Gathers every live weight (move edges in edge order, forward before
// backward, then self-loops in vertex order), normalizes them together and
// writes them back into g.
void assign_normalized_weights(MixedGuidanceGraph& g, const WeightTensor& weights) {
  const BaseGraph& base = g.base();
  const auto& edges = base.edges();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(2 * base.num_edges() + base.num_vertices()));
  for (int e = 0; e < base.num_edges(); ++e) {
    const auto& edge = edges[static_cast<std::size_t>(e)];
    const Heading fh = base.forward_heading(e);
    if (has_forward(g.dir(e))) values.push_back(weights.data.at(edge.u, index(fh)));
    if (has_backward(g.dir(e))) values.push_back(weights.data.at(edge.v, index(opposite(fh))));
  }
  for (CellId c : base.vertices()) values.push_back(weights.data.at(c, kSelfLoopChannel));

  min_max_normalize(values, g.bounds());

  std::size_t k = 0;
  for (int e = 0; e < base.num_edges(); ++e) {
    const EdgeDir d = g.dir(e);
    const double f = has_forward(d) ? values[k++] : 0.0;
    const double b = has_backward(d) ? values[k++] : 0.0;
    g.set_edge(e, d, f, b);
  }
  for (CellId c : base.vertices()) g.set_self_loop(c, values[k++]);
}

}  // namespace

Tensor weight_validity_mask(const BaseGraph& base) {
  Tensor mask(base.height(), base.width(), kWeightChannels);
  for (CellId c : base.vertices()) {
    for (Heading h : kHeadings) mask.at(c, index(h)) = base.edge_at(c, h) >= 0 ? 1.0 : 0.0;
    mask.at(c, kSelfLoopChannel) = 1.0;
  }
  return mask;
}

GraphTensors to_tensors(const MixedGuidanceGraph& g) {
  const BaseGraph& base = g.base();
  GraphTensors t{{Tensor(base.height(), base.width(), kWeightChannels)},
                 {Tensor(base.height(), base.width(), kDirIndependentChannels)}};
  for (CellId c : base.vertices()) {
    for (Heading h : kHeadings) {
      if (g.has_move(c, h)) {
        t.weights.data.at(c, index(h)) = g.move_weight(c, h);
        t.dirs.data.at(c, index(h)) = 1.0;
      }
    }
    t.weights.data.at(c, kSelfLoopChannel) = g.self_loop(c);
  }
  return t;
}

MixedGuidanceGraph from_tensors(BaseGraphPtr base, const WeightTensor& weights,
                                const DirTensorIndependent& dirs, WeightBounds bounds) {
  check_shape(weights.data, *base, kWeightChannels, "weight tensor");
  check_shape(dirs.data, *base, kDirIndependentChannels, "direction tensor");
  MixedGuidanceGraph g(base, bounds);
  for (int e = 0; e < base->num_edges(); ++e) {
    const auto& edge = base->edges()[static_cast<std::size_t>(e)];
    const Heading fh = base->forward_heading(e);
    const bool f = dirs.data.at(edge.u, index(fh)) != 0.0;
    const bool b = dirs.data.at(edge.v, index(opposite(fh))) != 0.0;
    if (!f && !b) {
      throw Error(ErrorKind::Invariant, "direction tensor leaves edge " + std::to_string(e) + " with no direction");
    }
    const EdgeDir d = f && b ? EdgeDir::Both : f ? EdgeDir::Forward : EdgeDir::Backward;
    g.set_edge(e, d, weights.data.at(edge.u, index(fh)), weights.data.at(edge.v, index(opposite(fh))));
  }
  for (CellId c : base->vertices()) g.set_self_loop(c, weights.data.at(c, kSelfLoopChannel));
  g.validate();
  return g;
}

void min_max_normalize(std::span<double> values, WeightBounds bounds) {
  if (values.empty()) return;
  double lo = values[0];
  double hi = values[0];
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "min_max_normalize: non-finite value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) {
    std::fill(values.begin(), values.end(), bounds.midpoint());
    return;
  }
  const double scale = (bounds.upper - bounds.lower) / (hi - lo);
  for (double& v : values) {
    v = std::clamp(bounds.lower + (v - lo) * scale, bounds.lower, bounds.upper);
  }
}

MixedGuidanceGraph decode_dependent(BaseGraphPtr base, const DirTensorDependent& dirs,
                                    const WeightTensor& weights, WeightBounds bounds) {
  check_shape(dirs.data, *base, kDirDependentChannels, "dependent direction tensor");
  check_shape(weights.data, *base, kWeightChannels, "weight tensor");
  check_finite(dirs.data, "dependent direction tensor");
  check_finite(weights.data, "weight tensor");
  MixedGuidanceGraph g(base, bounds);
  for (int e = 0; e < base->num_edges(); ++e) {
    if (base->is_bridge(e)) continue;
    const auto& edge = base->edges()[static_cast<std::size_t>(e)];
    const int first = base->forward_heading(e) == Heading::East ? 0 : 3;
    int best = 0;
    for (int k = 1; k < 3; ++k) {
      if (dirs.data.at(edge.u, first + k) > dirs.data.at(edge.u, first + best)) best = k;
    }
    g.set_dir(e, best == 0 ? EdgeDir::Forward : best == 1 ? EdgeDir::Backward : EdgeDir::Both);
  }
  assign_normalized_weights(g, weights);
  return g;
}

MixedGuidanceGraph decode_bidirected(BaseGraphPtr base, const WeightTensor& weights,
                                     WeightBounds bounds) {
  check_shape(weights.data, *base, kWeightChannels, "weight tensor");
  check_finite(weights.data, "weight tensor");
  MixedGuidanceGraph g(base, bounds);
  assign_normalized_weights(g, weights);
  return g;
}

}  // namespace mggo
