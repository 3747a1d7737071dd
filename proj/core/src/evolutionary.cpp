#include "mggo/evolutionary.hpp"

#include "mggo/ers.hpp"
#include "mggo/orientation.hpp"

namespace mggo {

int ea_batch_size(int requested) {
  if (requested < 1) throw Error(ErrorKind::InvalidArgument, "EA batch size must be positive");
  return (requested + 2) / 3 * 3;
}

MutationOp ea_operator_for(int index, int batch_size) {
  const int third = batch_size / 3;
  if (index < third) return MutationOp::KEdges;
  if (index < 2 * third) return MutationOp::KVertices;
  return MutationOp::RandomCycle;
}

std::vector<ErsResult> ea_initial_batch(const BaseGraphPtr& base, int batch_size,
                                                 std::uint64_t seed, WeightBounds bounds) {
  const int lambda = ea_batch_size(batch_size);
  const int third = lambda / 3;
  const int pmax = max_crisscross_period(*base);
  std::vector<ErsResult> batch;
  batch.reserve(static_cast<std::size_t>(lambda));
  for (int i = 0; i < lambda; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    MixedGuidanceGraph g = i < third       ? crisscross(base, 1 + i % pmax, bounds)
                           : i < 2 * third ? dfs_orientation(base, derive_seed(derive_seed(seed, "init-dfs"), idx), bounds)
                                           : random_orientation(base, derive_seed(derive_seed(seed, "init-random"), idx), bounds);
    batch.push_back(ers_repair(std::move(g), derive_seed(derive_seed(seed, "init-ers"), idx)));
  }
  return batch;
}

std::vector<ErsResult> ea_children(const EaState& state, std::uint64_t seed) {
  if (!state.parent) throw Error(ErrorKind::InvalidArgument, "EA has no parent to mutate");
  const std::uint64_t gen_seed = derive_seed(seed, static_cast<std::uint64_t>(state.generation));
  std::vector<ErsResult> children;
  children.reserve(static_cast<std::size_t>(state.batch_size));
  for (int i = 0; i < state.batch_size; ++i) {
    const std::uint64_t child_seed = derive_seed(gen_seed, static_cast<std::uint64_t>(i));
    Rng rng(derive_seed(child_seed, "mutation"));
    MixedGuidanceGraph child = mutate(*state.parent, ea_operator_for(i, state.batch_size), rng);
    children.push_back(ers_repair(std::move(child), derive_seed(child_seed, "ers")));
  }
  return children;
}

bool ea_select(EaState& state, std::span<const MixedGuidanceGraph> graphs, std::span<const double> fitness) {
  if (graphs.size() != fitness.size()) throw Error(ErrorKind::InvalidArgument, "EA select: size mismatch");
  state.eval_count += static_cast<long long>(graphs.size());
  ++state.generation;
  int best = -1;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    if (best < 0 || fitness[i] > fitness[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  if (best < 0) return false;
  const auto b = static_cast<std::size_t>(best);
  if (state.parent && !(fitness[b] > state.parent_fitness)) return false;
  state.parent = graphs[b];
  state.parent_fitness = fitness[b];
  return true;
}

}  // namespace mggo
