#pragma once

#include <vector>

#include <json.hpp>

#include "mggo/simulator.hpp"
#include "mggo/tensors.hpp"

namespace mggo {

struct TrafficConfig {
  int num_observations = 2;  // N_obs
  int num_agents = 10;
  int horizon = 500;
  std::uint64_t seed = 0;
  PriorityMode priority = PriorityMode::DistToGoal;
  WeightBounds bounds{};
};

/// Traffic observed on the two reference graphs: the unweighted bidirected
/// graph and the repaired directed crisscross (period 1). Each traffic
/// tensor is normalized by num_agents * horizon.
struct TrafficPatterns {
  std::vector<Tensor> unweighted_traffic;
  std::vector<Tensor> crisscross_traffic;
  GraphTensors unweighted_graph;
  GraphTensors crisscross_graph;

  int num_observations() const { return static_cast<int>(unweighted_traffic.size()); }
  /// 2 * 7 * N_obs + 2 * 9.
  int input_depth() const;

  nlohmann::json to_json() const;
  static TrafficPatterns from_json(const nlohmann::json& j);
  bool operator==(const TrafficPatterns&) const;
};

TrafficPatterns collect_traffic_patterns(const BaseGraphPtr& base, const TrafficConfig& cfg);

}  // namespace mggo
