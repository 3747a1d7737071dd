#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mggo/simulator.hpp"

namespace mggo {

/// Runs fn(0) .. fn(n - 1) on up to `workers` threads (0 = hardware
/// concurrency). The first exception thrown by any call is rethrown after
/// all threads join. Results must be written by index, never by order.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

struct EvalConfig {
  int num_agents = 10;
  int horizon = 500;
  int num_runs = 5;  // N_e
  std::uint64_t seed = 0;
  PriorityMode priority = PriorityMode::DistToGoal;
  int workers = 1;
};

/// Seed of replica `index`: the "sim" substream of `seed`, then the index.
std::uint64_t replica_seed(std::uint64_t seed, int index);

struct MetricSummary {
  double mean = 0.0;
  /// Sample standard deviation over sqrt(N); 0 for a single run.
  double stderr_ = 0.0;
};

MetricSummary summarize(const std::vector<double>& samples);

struct EvalSummary {
  MetricSummary throughput;
  MetricSummary wait_ratio;
  MetricSummary rotate_ratio;
  std::vector<double> throughputs;
  long long vertex_conflicts = 0;
  long long swap_conflicts = 0;
};

/// N_e replicas with seeds replica_seed(cfg.seed, i), run in parallel.
EvalSummary evaluate_graph(const MixedGuidanceGraph& g, const EvalConfig& cfg);

/// Mean throughput of every graph, each over the same replica seeds. Graphs
/// are spread over the worker pool; replicas of one graph run sequentially
/// and share one cost-to-go cache.
std::vector<double> evaluate_batch(std::span<const MixedGuidanceGraph> graphs, const EvalConfig& cfg);

struct NamedGraph {
  std::string name;
  MixedGuidanceGraph graph;
};

/// "no-guidance" (unweighted, bidirected) and "crisscross-ers" (period-1
/// directed crisscross repaired with ERS).
std::vector<NamedGraph> baseline_graphs(const BaseGraphPtr& base, std::uint64_t seed, WeightBounds bounds = {});

}  // namespace mggo
