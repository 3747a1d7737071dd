#include "mggo/traffic.hpp"

#include "mggo/ers.hpp"
#include "mggo/orientation.hpp"

namespace mggo {

namespace {

using nlohmann::json;

json tensor_to_json(const Tensor& t) {
  return json{{"shape", {t.height(), t.width(), t.channels()}},
              {"data", std::vector<double>(t.values().begin(), t.values().end())}};
}

Tensor tensor_from_json(const json& j) {
  const auto shape = j.at("shape").get<std::vector<int>>();
  if (shape.size() != 3) throw Error(ErrorKind::Parse, "tensor shape must have 3 dims");
  Tensor t(shape[0], shape[1], shape[2]);
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != t.size()) throw Error(ErrorKind::Parse, "tensor data size mismatch");
  std::copy(data.begin(), data.end(), t.values().begin());
  return t;
}

json graph_tensors_to_json(const GraphTensors& g) {
  return json{{"weights", tensor_to_json(g.weights.data)}, {"dirs", tensor_to_json(g.dirs.data)}};
}

GraphTensors graph_tensors_from_json(const json& j) {
  return {{tensor_from_json(j.at("weights"))}, {tensor_from_json(j.at("dirs"))}};
}

std::vector<Tensor> observe(const MixedGuidanceGraph& g, const TrafficConfig& cfg, std::string_view stream) {
  std::vector<Tensor> out;
  CostToGoCache cache(g);
  const double norm = static_cast<double>(cfg.num_agents) * cfg.horizon;
  for (int i = 0; i < cfg.num_observations; ++i) {
    SimConfig sim{cfg.num_agents, cfg.horizon,
                  derive_seed(derive_seed(cfg.seed, stream), static_cast<std::uint64_t>(i)), cfg.priority};
    Tensor traffic = run_simulation(g, sim, cache).traffic;
    for (double& v : traffic.values()) v /= norm;
    out.push_back(std::move(traffic));
  }
  return out;
}

}  // namespace

int TrafficPatterns::input_depth() const {
  return 2 * kTrafficChannels * num_observations() + 2 * (kWeightChannels + kDirIndependentChannels);
}

json TrafficPatterns::to_json() const {
  json u = json::array(), c = json::array();
  for (const auto& t : unweighted_traffic) u.push_back(tensor_to_json(t));
  for (const auto& t : crisscross_traffic) c.push_back(tensor_to_json(t));
  return json{{"unweighted_traffic", std::move(u)},
              {"crisscross_traffic", std::move(c)},
              {"unweighted_graph", graph_tensors_to_json(unweighted_graph)},
              {"crisscross_graph", graph_tensors_to_json(crisscross_graph)}};
}

TrafficPatterns TrafficPatterns::from_json(const json& j) {
  try {
    TrafficPatterns p;
    for (const auto& t : j.at("unweighted_traffic")) p.unweighted_traffic.push_back(tensor_from_json(t));
    for (const auto& t : j.at("crisscross_traffic")) p.crisscross_traffic.push_back(tensor_from_json(t));
    p.unweighted_graph = graph_tensors_from_json(j.at("unweighted_graph"));
    p.crisscross_graph = graph_tensors_from_json(j.at("crisscross_graph"));
    return p;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::Parse, std::string("malformed traffic pattern JSON: ") + ex.what());
  }
}

bool TrafficPatterns::operator==(const TrafficPatterns& o) const {
  return unweighted_traffic == o.unweighted_traffic && crisscross_traffic == o.crisscross_traffic &&
         unweighted_graph.weights.data == o.unweighted_graph.weights.data &&
         unweighted_graph.dirs.data == o.unweighted_graph.dirs.data &&
         crisscross_graph.weights.data == o.crisscross_graph.weights.data &&
         crisscross_graph.dirs.data == o.crisscross_graph.dirs.data;
}

TrafficPatterns collect_traffic_patterns(const BaseGraphPtr& base, const TrafficConfig& cfg) {
  if (cfg.num_observations < 1) throw Error(ErrorKind::InvalidArgument, "N_obs must be at least 1");
  const MixedGuidanceGraph unweighted = make_unweighted(base, cfg.bounds);
  const MixedGuidanceGraph directed =
      ers_repair(crisscross(base, 1, cfg.bounds), derive_seed(cfg.seed, "traffic-ers")).graph;
  TrafficPatterns p;
  p.unweighted_traffic = observe(unweighted, cfg, "traffic-unweighted");
  p.crisscross_traffic = observe(directed, cfg, "traffic-crisscross");
  p.unweighted_graph = to_tensors(unweighted);
  p.crisscross_graph = to_tensors(directed);
  return p;
}

}  // namespace mggo
