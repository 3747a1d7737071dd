#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mggo/ers.hpp"
#include "mggo/mutation.hpp"

namespace mggo {

/// Rounds up to a positive multiple of 3.
int ea_batch_size(int requested);

/// Operator assigned to child `index` of a batch of `batch_size`: the first
/// third uses k-edges, the second k-vertices, the last random-cycle.
MutationOp ea_operator_for(int index, int batch_size);

/// Repaired initial population: one third crisscross (periods cycling from 1
/// to the largest admissible), one third DFS orientations, one third random
/// orientations. Graph `i` is repaired with ERS seeded from (seed, i).
std::vector<ErsResult> ea_initial_batch(const BaseGraphPtr& base, int batch_size,
                                                 std::uint64_t seed, WeightBounds bounds = {});

/// (1 + lambda) elitist state over edge orientations.
struct EaState {
  std::optional<MixedGuidanceGraph> parent;
  double parent_fitness = 0.0;
  int batch_size = 12;
  long long eval_count = 0;
  int generation = 0;
};

/// Mutated and repaired children of the current parent for this generation.
/// Seeds derive from (seed, generation, child index).
std::vector<ErsResult> ea_children(const EaState& state, std::uint64_t seed);

/// Counts the evaluations, takes the best candidate as parent when there is
/// no parent yet or it is strictly fitter, and advances the generation.
/// Returns true if the parent changed. Ties go to the earliest candidate.
bool ea_select(EaState& state, std::span<const MixedGuidanceGraph> graphs, std::span<const double> fitness);

}  // namespace mggo
